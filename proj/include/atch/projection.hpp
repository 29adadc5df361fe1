#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "atch/canonical.hpp"
#include "atch/store.hpp"

namespace atch {

struct BinaryGraph {
    std::set<std::string> nodes;
    // Unordered pairs stored with first < second.
    std::set<std::pair<std::string, std::string>> edges;

    void add_edge(const std::string& a, const std::string& b);
    bool operator==(const BinaryGraph&) const = default;
};

// Union of the participant cliques of every edge. Nodes are the store's
// vertices plus every participant reference.
BinaryGraph project_binary(const Snapshot& snapshot);

// One binary edge per pair, one vertex per node.
Store store_from_graph(const BinaryGraph& graph);

struct ComponentBits {
    double structural = 0.0;
    double temporal = 0.0;
    double confidence = 0.0;
    double causal = 0.0;
};

struct LossReport {
    std::vector<std::pair<EdgeId, std::uint64_t>> per_edge_bits;
    std::uint64_t total_bits = 0;
    double avg_arity = 0.0;
    // |E| * C(avg_arity, 2), the convexity lower bound on total_bits.
    double convexity_bound = 0.0;
    ComponentBits component_bits;
};

std::uint64_t pairs_of(std::size_t arity);

LossReport ambiguity_bound(const Snapshot& snapshot);

inline constexpr std::size_t kMaxPreimageNodes = 6;

// Number of hyperedge sets (members of arity >= 2) whose clique union is
// exactly the graph's edge set. Throws Error(TooLarge) when more than
// max_nodes nodes carry edges or max_nodes exceeds kMaxPreimageNodes.
std::uint64_t count_preimages(const BinaryGraph& graph, std::size_t max_nodes = kMaxPreimageNodes);

enum class Pillar { Structure = 1, Time = 2, Confidence = 3, Causality = 4 };

std::string_view to_string(Pillar pillar);
// Accepts "P1".."P4" (case-insensitive) or "1".."4".
std::optional<Pillar> parse_pillar(std::string_view text);

// Encoded-size proxies for the four components:
//   structural  sum of C(n_i, 2)
//   temporal    2 * |E| * ceil(log2(R + 2)), R the finite timestamp range in us
//   confidence  53 * |E|
//   causal      |links| * 2 * ceil(log2 |E|)
ComponentBits component_bits(const Snapshot& snapshot);

struct GapReport {
    ComponentBits components;
    std::set<Pillar> missing;
    double total_bits = 0.0;
};

GapReport expressiveness_gap(const Snapshot& snapshot, const std::set<Pillar>& missing);

canonical::Json to_canonical(const LossReport& report);
canonical::Json to_canonical(const GapReport& report);

}  // namespace atch
