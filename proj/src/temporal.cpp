#include "atch/temporal.hpp"

#include <vector>

namespace atch {

namespace {

template <typename Next>
std::set<EdgeId> closure(const EdgeId& start, Next&& next) {
    std::set<EdgeId> seen;
    std::vector<EdgeId> frontier{start};
    while (!frontier.empty()) {
        EdgeId cur = std::move(frontier.back());
        frontier.pop_back();
        for (const CausalLink* link : next(cur)) {
            const EdgeId& other = link->cause == cur ? link->effect : link->cause;
            if (seen.insert(other).second) frontier.push_back(other);
        }
    }
    seen.erase(start);
    return seen;
}

std::vector<const CausalLink*> filter(std::vector<const CausalLink*> links, std::optional<LinkKind> kind) {
    if (!kind) return links;
    std::erase_if(links, [&](const CausalLink* l) { return l->kind != *kind; });
    return links;
}

}  // namespace

TemporalQueryResult at_time(const Snapshot& snapshot, Timestamp t, std::optional<double> confidence_above) {
    TemporalQueryResult result;
    result.as_of_valid_time = t;
    result.as_of_seq = snapshot.as_of_seq();
    snapshot.valid_time_index().stabbing(t, [&](const EdgeId& id) {
        if (confidence_above && !(snapshot.edge(id).confidence > *confidence_above)) return;
        result.edges.insert(id);
    });
    return result;
}

std::set<EdgeId> valid_in_interval(const Snapshot& snapshot, const TimeInterval& interval) {
    if (!interval.well_formed()) {
        throw Error(ErrorCode::MalformedInterval,
                    "interval start " + interval.start.to_string() + " after end " + interval.end.to_string());
    }
    std::set<EdgeId> out;
    snapshot.valid_time_index().overlapping(interval.start, interval.end, [&](const EdgeId& id) { out.insert(id); });
    return out;
}

std::set<EdgeId> causal_ancestors(const Snapshot& snapshot, const EdgeId& edge, std::optional<LinkKind> kind) {
    snapshot.edge(edge);
    return closure(edge, [&](const EdgeId& id) { return filter(snapshot.links_to(id), kind); });
}

std::set<EdgeId> causal_descendants(const Snapshot& snapshot, const EdgeId& edge, std::optional<LinkKind> kind) {
    snapshot.edge(edge);
    return closure(edge, [&](const EdgeId& id) { return filter(snapshot.links_from(id), kind); });
}

std::set<EdgeId> blast_radius(const Snapshot& snapshot, const EdgeId& edge) {
    std::set<EdgeId> out = causal_ancestors(snapshot, edge);
    out.merge(causal_descendants(snapshot, edge));
    return out;
}

}  // namespace atch
