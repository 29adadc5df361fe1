#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atch/store.hpp"

namespace atch {

struct ClaimCluster {
    std::string proposition;
    Polarity polarity = Polarity::Supports;
    std::vector<EdgeId> members;
    // Noisy-OR over the members' effective confidences; 0 when empty.
    double accumulated = 0.0;
};

struct ContradictionSignal {
    std::string proposition;
    ClaimCluster supporting;
    ClaimCluster refuting;
    double threshold = 0.0;
};

// Members are the edges tagged (proposition, polarity) whose effective κ is
// strictly above member_floor.
ClaimCluster accumulate_claim(const Snapshot& snapshot, const std::string& proposition, Polarity polarity,
                              double member_floor);

// Fires iff both clusters accumulate strictly more than theta. Membership
// uses member_floor, independent of theta. Throws Error(DomainError) unless
// 0 < theta < 1.
std::optional<ContradictionSignal> detect_contradiction(const Snapshot& snapshot, const std::string& proposition,
                                                        double theta, double member_floor = 0.0);

struct LabelCounts {
    std::size_t positive = 0;
    std::size_t negative = 0;

    std::size_t total() const { return positive + negative; }
    bool operator==(const LabelCounts&) const = default;
};

// Shannon entropy of a binary label distribution, in bits.
double label_entropy(const LabelCounts& counts);

struct Observation {
    EdgeId id;
    bool positive = true;
    Attributes attributes;
    double confidence = 1.0;
};

// Category label used when an observation lacks the attribute.
inline constexpr std::string_view kMissingCategory = "⊥";

struct PartitionNode;

struct PartitionBranch {
    std::string label;
    // Empty for the missing-value category.
    std::optional<AttrValue> value;
    LabelCounts counts;
    std::shared_ptr<const PartitionNode> child;
};

struct PartitionNode {
    std::string attribute;
    double gain = 0.0;
    std::vector<PartitionBranch> branches;
};

// Information gain of one attribute in bits. Throws Error(EmptyObservations).
double information_gain(std::span<const Observation> observations, const std::string& attribute);

// One pass over the observation/attribute matrix: per-attribute category
// tables and their information gain.
struct AttributeScore {
    std::string attribute;
    double gain = 0.0;
    std::vector<PartitionBranch> partition;
};
std::vector<AttributeScore> score_attributes(std::span<const Observation> observations);

struct DiscoveryResult {
    std::string best_attribute;
    double gain = 0.0;
    double label_entropy = 0.0;
    std::vector<PartitionBranch> partition;
    // Present when the best attribute leaves impure branches that a further
    // attribute can split.
    std::shared_ptr<const PartitionNode> residual_tree;
    bool no_separator = false;
};

inline constexpr int kDefaultPartitionDepth = 3;

std::vector<Observation> observations_of(const Snapshot& snapshot, const ContradictionSignal& signal);

// Throws Error(EmptyObservations) / Error(NoAttributes).
DiscoveryResult discover_hidden_context(std::span<const Observation> observations,
                                        int max_depth = kDefaultPartitionDepth);
DiscoveryResult discover_hidden_context(const Snapshot& snapshot, const ContradictionSignal& signal,
                                        int max_depth = kDefaultPartitionDepth);

// The context-specific edges a split would append, one per non-missing
// branch with a strict majority polarity. Throws Error(ZeroGain).
std::vector<Hyperedge> plan_context_split(const Snapshot& snapshot, const ContradictionSignal& signal,
                                          const DiscoveryResult& discovery);
// Appends the planned edges; existing records are untouched.
std::vector<Hyperedge> split_on_context(Store& store, const ContradictionSignal& signal,
                                        const DiscoveryResult& discovery);

enum class Decision { PreferA, PreferB, Coexist };
enum class ResolutionTier { Temporal, Confidence, Source, Specificity, None };

std::string_view to_string(Decision decision);
std::string_view to_string(ResolutionTier tier);

struct Verdict {
    Decision decision = Decision::Coexist;
    ResolutionTier tier = ResolutionTier::None;
    std::vector<std::string> rationale;
};

// Attribute keys that never count towards specificity.
bool is_bookkeeping_attribute(std::string_view key);
std::size_t specificity(const Hyperedge& edge);

// Temporal, confidence, source priority, specificity; first decisive tier
// wins. Throws Error(NotInConflict) unless the edges carry opposing claims on
// one proposition.
Verdict resolve(const Snapshot& snapshot, const EdgeId& a, const EdgeId& b);

struct AuditReport {
    // The edge itself followed by its causal ancestors.
    std::vector<EdgeId> chain_a;
    std::vector<EdgeId> chain_b;
    std::vector<EdgeId> faulty_a;
    std::vector<EdgeId> faulty_b;
    std::optional<Decision> recommendation;
    std::vector<EdgeId> explanations;
};

// Analysis only; nothing is appended.
AuditReport audit_chains(const Snapshot& snapshot, const EdgeId& a, const EdgeId& b, double confidence_floor);
// Appends one "caused incorrect belief" edge per faulty source when exactly
// one side's chain is tainted.
AuditReport causal_audit(Store& store, const EdgeId& a, const EdgeId& b, double confidence_floor);

}  // namespace atch
