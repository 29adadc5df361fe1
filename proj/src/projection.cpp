#include "atch/projection.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <map>

namespace atch {

void BinaryGraph::add_edge(const std::string& a, const std::string& b) {
    if (a == b) return;
    nodes.insert(a);
    nodes.insert(b);
    edges.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
}

BinaryGraph project_binary(const Snapshot& snapshot) {
    BinaryGraph g;
    for (const auto& [id, v] : snapshot.vertices()) g.nodes.insert(id);
    for (const auto& [id, state] : snapshot.edges()) {
        const auto& parts = state.effective.participants;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            g.nodes.insert(parts[i].ref);
            for (std::size_t j = i + 1; j < parts.size(); ++j) g.add_edge(parts[i].ref, parts[j].ref);
        }
    }
    return g;
}

Store store_from_graph(const BinaryGraph& graph) {
    StoreOptions options;
    options.clock = [] { return Timestamp(0); };
    Store store(options);
    for (const auto& n : graph.nodes) store.add_vertex(Vertex{n, {}});
    for (const auto& [a, b] : graph.edges) {
        Hyperedge e;
        e.id = a + "--" + b;
        e.participants = {{a, std::nullopt}, {b, std::nullopt}};
        e.valid_time = {Timestamp(0), Timestamp::infinity()};
        store.add_edge(std::move(e));
    }
    return store;
}

std::uint64_t pairs_of(std::size_t arity) {
    return arity < 2 ? 0 : static_cast<std::uint64_t>(arity) * (arity - 1) / 2;
}

ComponentBits component_bits(const Snapshot& snapshot) {
    ComponentBits bits;
    const auto& edges = snapshot.edges();
    const double n_edges = static_cast<double>(edges.size());
    std::optional<std::int64_t> lo, hi;
    for (const auto& [id, state] : edges) {
        bits.structural += static_cast<double>(pairs_of(state.effective.participants.size()));
        for (Timestamp t : {state.effective.valid_time.start, state.effective.valid_time.end}) {
            if (t.is_infinite()) continue;
            lo = std::min(lo.value_or(t.micros()), t.micros());
            hi = std::max(hi.value_or(t.micros()), t.micros());
        }
    }
    if (!edges.empty()) {
        // R + 2 so that a zero range still costs one bit per endpoint.
        double range = lo ? static_cast<double>(*hi) - static_cast<double>(*lo) : 0.0;
        bits.temporal = 2.0 * n_edges * std::ceil(std::log2(range + 2.0));
        bits.confidence = 53.0 * n_edges;
    }
    if (edges.size() > 1) {
        bits.causal = static_cast<double>(snapshot.links().size()) * 2.0 * std::ceil(std::log2(n_edges));
    }
    return bits;
}

LossReport ambiguity_bound(const Snapshot& snapshot) {
    LossReport report;
    std::uint64_t arity_sum = 0;
    for (const auto& [id, state] : snapshot.edges()) {
        std::size_t n = state.effective.participants.size();
        arity_sum += n;
        report.per_edge_bits.emplace_back(id, pairs_of(n));
        report.total_bits += pairs_of(n);
    }
    const double count = static_cast<double>(report.per_edge_bits.size());
    if (count > 0) {
        report.avg_arity = static_cast<double>(arity_sum) / count;
        report.convexity_bound = count * report.avg_arity * (report.avg_arity - 1.0) / 2.0;
    }
    report.component_bits = component_bits(snapshot);
    return report;
}

std::uint64_t count_preimages(const BinaryGraph& graph, std::size_t max_nodes) {
    if (max_nodes > kMaxPreimageNodes) {
        throw Error(ErrorCode::TooLarge, "preimage counting is limited to " + std::to_string(kMaxPreimageNodes) + " nodes");
    }
    std::map<std::string, int> index;
    for (const auto& [a, b] : graph.edges) {
        index.emplace(a, 0);
        index.emplace(b, 0);
    }
    if (index.size() > max_nodes) {
        throw Error(ErrorCode::TooLarge, std::to_string(index.size()) + " connected nodes exceed the limit of " +
                                             std::to_string(max_nodes));
    }
    int k = 0;
    for (auto& [name, i] : index) i = k++;
    const int n = k;
    const int m = static_cast<int>(graph.edges.size());
    std::vector<std::pair<int, int>> pairs;
    for (const auto& [a, b] : graph.edges) pairs.emplace_back(index[a], index[b]);

    // Inclusion-exclusion over the edges a candidate set fails to cover:
    // sum over F of (-1)^|F| * 2^(cliques of G - F).
    __int128 total = 0;
    for (std::uint32_t forbidden = 0; forbidden < (1u << m); ++forbidden) {
        std::uint32_t adj[kMaxPreimageNodes] = {};
        for (int e = 0; e < m; ++e) {
            if (forbidden & (1u << e)) continue;
            adj[pairs[e].first] |= 1u << pairs[e].second;
            adj[pairs[e].second] |= 1u << pairs[e].first;
        }
        int cliques = 0;
        for (std::uint32_t s = 1; s < (1u << n); ++s) {
            if (std::popcount(s) < 2) continue;
            bool ok = true;
            for (int v = 0; v < n && ok; ++v) {
                if ((s & (1u << v)) && ((adj[v] | (1u << v)) & s) != s) ok = false;
            }
            cliques += ok;
        }
        __int128 term = static_cast<__int128>(1) << cliques;
        total += (std::popcount(forbidden) % 2) ? -term : term;
    }
    return static_cast<std::uint64_t>(total);
}

std::string_view to_string(Pillar pillar) {
    switch (pillar) {
        case Pillar::Structure: return "P1";
        case Pillar::Time: return "P2";
        case Pillar::Confidence: return "P3";
        case Pillar::Causality: return "P4";
    }
    return "?";
}

std::optional<Pillar> parse_pillar(std::string_view text) {
    if (text.size() == 2 && std::toupper(static_cast<unsigned char>(text[0])) == 'P') text.remove_prefix(1);
    if (text.size() != 1 || text[0] < '1' || text[0] > '4') return std::nullopt;
    return static_cast<Pillar>(text[0] - '0');
}

GapReport expressiveness_gap(const Snapshot& snapshot, const std::set<Pillar>& missing) {
    GapReport report;
    report.components = component_bits(snapshot);
    report.missing = missing;
    for (Pillar p : missing) {
        switch (p) {
            case Pillar::Structure: report.total_bits += report.components.structural; break;
            case Pillar::Time: report.total_bits += report.components.temporal; break;
            case Pillar::Confidence: report.total_bits += report.components.confidence; break;
            case Pillar::Causality: report.total_bits += report.components.causal; break;
        }
    }
    return report;
}

namespace {

canonical::Json encode(const ComponentBits& bits) {
    return {{"causal", bits.causal},
            {"confidence", bits.confidence},
            {"structural", bits.structural},
            {"temporal", bits.temporal}};
}

}  // namespace

canonical::Json to_canonical(const LossReport& report) {
    canonical::Json per_edge = canonical::Json::object();
    for (const auto& [id, bits] : report.per_edge_bits) per_edge[id] = bits;
    return {{"avg_arity", report.avg_arity},
            {"component_bits", encode(report.component_bits)},
            {"component_note", "MDL proxy (artifact-defined)"},
            {"per_edge_bits", per_edge},
            {"convexity_bound", report.convexity_bound},
            {"total_bits", report.total_bits}};
}

canonical::Json to_canonical(const GapReport& report) {
    canonical::Json missing = canonical::Json::array();
    for (Pillar p : report.missing) missing.push_back(std::string(to_string(p)));
    return {{"component_bits", encode(report.components)},
            {"component_note", "MDL proxy (artifact-defined)"},
            {"missing", missing},
            {"total_bits", report.total_bits}};
}

}  // namespace atch
