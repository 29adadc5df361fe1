#pragma once

#include <cstdint>
#include <optional>
#include <set>

#include "atch/store.hpp"

namespace atch {

struct TemporalQueryResult {
    std::set<EdgeId> edges;
    Timestamp as_of_valid_time;
    std::uint64_t as_of_seq = 0;
};

// Edges whose effective valid interval contains t. A confidence floor, when
// given, keeps only edges with effective κ strictly above it.
TemporalQueryResult at_time(const Snapshot& snapshot, Timestamp t,
                            std::optional<double> confidence_above = std::nullopt);

// Edges whose effective valid interval intersects the closed interval.
// Throws Error(MalformedInterval).
std::set<EdgeId> valid_in_interval(const Snapshot& snapshot, const TimeInterval& interval);

// Strict causal ancestors and descendants of an edge over every link kind.
// Throws Error(UnknownEdge).
std::set<EdgeId> blast_radius(const Snapshot& snapshot, const EdgeId& edge);

// Strict ancestors (or descendants) only; restricted to one link kind when
// given.
std::set<EdgeId> causal_ancestors(const Snapshot& snapshot, const EdgeId& edge,
                                  std::optional<LinkKind> kind = std::nullopt);
std::set<EdgeId> causal_descendants(const Snapshot& snapshot, const EdgeId& edge,
                                    std::optional<LinkKind> kind = std::nullopt);

}  // namespace atch
