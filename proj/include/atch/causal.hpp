#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "atch/store.hpp"

namespace atch {

struct ChainNode {
    EdgeId edge;
    double node_confidence = 1.0;
};

struct ChainLink {
    std::string mechanism;
    double link_confidence = 1.0;
    double context_modifier = 1.0;

    double effective() const { return link_confidence * context_modifier; }
};

// Forward-ordered chain e1 ≺ e2 ≺ ... ≺ en. Node confidences past the first
// are reported but do not enter chain_confidence.
struct CausalChain {
    std::vector<ChainNode> nodes;
    std::vector<ChainLink> links;
    double chain_confidence = 0.0;
};

struct ChainSpec {
    double first_confidence = 1.0;
    std::vector<ChainLink> links;
};

// κ(e1) · Π κ≺(ei, ei+1) · Context(ei, ei+1)
double propagate_confidence(const ChainSpec& spec);

// Resolves an explicit forward path against the snapshot (first matching
// "causes" link per step, context rules applied). Throws Error(UnknownEdge)
// for missing edges and Error(ValidationFailed) when a step has no link.
CausalChain build_chain(const Snapshot& snapshot, const std::vector<EdgeId>& path);

// Π over matching rules of (1 - inhibition_strength); 1 when none match.
double context_modifier(const Hyperedge& cause, const Hyperedge& effect, std::string_view mechanism,
                        std::span<const ContextRule> rules);

enum class CombineMode { NoisyOr, Max };

// Throws Error(EmptyPathSet).
double combine_paths(std::span<const double> confidences, CombineMode mode);

// 1 - Π(1 - κi); 0 for an empty set.
double noisy_or(std::span<const double> confidences);

struct SharedAncestry {
    bool shared = false;
    // Union of the pairwise intersections of the paths' ancestor sets.
    std::set<EdgeId> common;

    CombineMode recommended_mode() const { return shared ? CombineMode::Max : CombineMode::NoisyOr; }
};

// Each path's ancestor set is its members above the final (join) node plus
// all of their strict causal ancestors.
SharedAncestry detect_shared_ancestors(const Snapshot& snapshot, const std::vector<std::vector<EdgeId>>& paths);

// ⌈ln θ / ln κ_min⌉. Throws Error(DomainError) unless 0 < κ_min < 1 and
// 0 < θ <= 1.
int effective_depth(double kappa_min, double theta);

// Edges valid at t that no edge valid at t currently inhibits.
std::set<EdgeId> active_defaults(const Snapshot& snapshot, Timestamp t);

enum class TraceDirection { Causes, Effects };

struct TraceOptions {
    int depth = 3;
    // Valid-time filter applied to every traversed edge except the target.
    std::optional<Timestamp> as_of;
    // Branches whose chain confidence drops below this are cut off.
    std::optional<double> threshold;
    TraceDirection direction = TraceDirection::Causes;
};

struct TraceNode {
    EdgeId edge;
    double node_confidence = 1.0;
    int depth = 0;
    // Link to the parent node in the tree; empty for the root.
    std::optional<ChainLink> link;
    // Confidence of the chain spanning this node and the root.
    double chain_confidence = 0.0;
    std::vector<TraceNode> children;
};

struct TraceResult {
    EdgeId root;
    TraceDirection direction = TraceDirection::Causes;
    TraceNode tree;

    // Every maximal root-to-leaf branch, oriented cause → effect.
    std::vector<CausalChain> chains() const;
    std::set<EdgeId> nodes() const;
    int max_links() const;
};

// Throws Error(UnknownEdge) for an unknown target, Error(DomainError) for a
// negative depth.
TraceResult trace_causal_chain(const Snapshot& snapshot, const EdgeId& target, const TraceOptions& options = {});

}  // namespace atch
