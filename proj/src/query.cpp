#include "atch/query.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace atch {

std::set<std::string> EdgeTemplate::variables() const {
    std::set<std::string> out;
    for (const auto& t : terms) {
        if (t.is_variable()) out.insert(t.name);
    }
    return out;
}

std::set<std::string> PatternQuery::variables() const {
    std::set<std::string> out;
    for (const auto& t : templates) out.merge(t.variables());
    return out;
}

std::vector<std::vector<int>> JoinTree::children() const {
    std::vector<std::vector<int>> out(parent.size());
    for (std::size_t i = 0; i < parent.size(); ++i) {
        if (parent[i] >= 0) out[static_cast<std::size_t>(parent[i])].push_back(static_cast<int>(i));
    }
    return out;
}

std::vector<int> JoinTree::preorder() const {
    std::vector<int> order;
    if (root < 0) return order;
    auto kids = children();
    std::vector<int> stack{root};
    while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        order.push_back(n);
        for (auto it = kids[static_cast<std::size_t>(n)].rbegin(); it != kids[static_cast<std::size_t>(n)].rend(); ++it)
            stack.push_back(*it);
    }
    return order;
}

AcyclicityResult is_alpha_acyclic(const std::vector<std::set<std::string>>& hyperedges) {
    AcyclicityResult result;
    const std::size_t n = hyperedges.size();
    result.tree.parent.assign(n, -1);
    if (n == 0) {
        result.acyclic = true;
        return result;
    }
    std::vector<std::set<std::string>> live = hyperedges;
    std::vector<bool> alive(n, true);
    std::size_t remaining = n;

    bool progress = true;
    while (remaining > 1 && progress) {
        progress = false;
        // Ear vertices: occur in exactly one live hyperedge.
        std::map<std::string, int> occurrences;
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            for (const auto& v : live[i]) ++occurrences[v];
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive[i]) continue;
            std::size_t before = live[i].size();
            std::erase_if(live[i], [&](const std::string& v) { return occurrences[v] == 1; });
            progress |= live[i].size() != before;
        }
        // Hyperedges contained in another live one fold into it.
        for (std::size_t i = 0; i < n && remaining > 1; ++i) {
            if (!alive[i]) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i || !alive[j]) continue;
                if (std::includes(live[j].begin(), live[j].end(), live[i].begin(), live[i].end())) {
                    alive[i] = false;
                    result.tree.parent[i] = static_cast<int>(j);
                    --remaining;
                    progress = true;
                    break;
                }
            }
        }
    }

    if (remaining == 1) {
        result.acyclic = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (alive[i]) result.tree.root = static_cast<int>(i);
        }
        return result;
    }
    result.tree.parent.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (alive[i]) result.witness.push_back(static_cast<int>(i));
    }
    return result;
}

AcyclicityResult is_alpha_acyclic(const PatternQuery& pattern) {
    std::vector<std::set<std::string>> hyperedges;
    for (const auto& t : pattern.templates) hyperedges.push_back(t.variables());
    return is_alpha_acyclic(hyperedges);
}

bool running_intersection(const JoinTree& tree, const std::vector<std::set<std::string>>& hyperedges) {
    const std::size_t n = hyperedges.size();
    if (tree.parent.size() != n) return false;
    if (n == 0) return true;
    if (tree.root < 0 || static_cast<std::size_t>(tree.root) >= n || tree.preorder().size() != n) return false;
    std::set<std::string> all;
    for (const auto& h : hyperedges) all.insert(h.begin(), h.end());
    // A variable's nodes are connected iff exactly one of them has a parent
    // outside the set.
    for (const auto& v : all) {
        int tops = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!hyperedges[i].count(v)) continue;
            int p = tree.parent[i];
            if (p < 0 || !hyperedges[static_cast<std::size_t>(p)].count(v)) ++tops;
        }
        if (tops != 1) return false;
    }
    return true;
}

bool passes_filters(const Hyperedge& edge, const EdgeTemplate& tmpl, const PatternQuery& pattern) {
    if (pattern.at_time && !edge.valid_time.contains(*pattern.at_time)) return false;
    if (pattern.window && !edge.valid_time.intersects(*pattern.window)) return false;
    if (pattern.min_confidence && !(edge.confidence > *pattern.min_confidence)) return false;
    if (tmpl.min_confidence && !(edge.confidence > *tmpl.min_confidence)) return false;
    return true;
}

namespace {

// One leaf relation: the template's variables in sorted order, and one row
// per (edge, assignment) match.
struct Relation {
    std::vector<std::string> columns;
    struct Row {
        EdgeId edge;
        std::vector<std::string> values;
        bool operator==(const Row&) const = default;
        auto operator<=>(const Row&) const = default;
    };
    std::vector<Row> rows;

    int column(const std::string& var) const {
        auto it = std::lower_bound(columns.begin(), columns.end(), var);
        return (it != columns.end() && *it == var) ? static_cast<int>(it - columns.begin()) : -1;
    }
};

// Injective embeddings of the template's terms into the edge's participant
// positions.
void match_edge(const Hyperedge& edge, const EdgeTemplate& tmpl, const Relation& shape, std::vector<Relation::Row>& out) {
    const auto& parts = edge.participants;
    if (tmpl.terms.size() > parts.size()) return;
    std::vector<bool> used(parts.size(), false);
    std::vector<std::string> values(shape.columns.size());
    std::vector<bool> bound(shape.columns.size(), false);

    std::function<void(std::size_t)> place = [&](std::size_t k) {
        if (k == tmpl.terms.size()) {
            out.push_back({edge.id, values});
            return;
        }
        const Term& term = tmpl.terms[k];
        for (std::size_t p = 0; p < parts.size(); ++p) {
            if (used[p]) continue;
            if (term.role && parts[p].role != term.role) continue;
            const std::string& ref = parts[p].ref;
            if (!term.is_variable()) {
                if (ref != term.name) continue;
                used[p] = true;
                place(k + 1);
                used[p] = false;
                continue;
            }
            auto col = static_cast<std::size_t>(shape.column(term.name));
            if (bound[col]) {
                if (values[col] != ref) continue;
                used[p] = true;
                place(k + 1);
                used[p] = false;
            } else {
                bound[col] = true;
                values[col] = ref;
                used[p] = true;
                place(k + 1);
                used[p] = false;
                bound[col] = false;
            }
        }
    };
    place(0);
}

Relation scan(const Snapshot& snapshot, const EdgeTemplate& tmpl, const PatternQuery& pattern, bool pushdown,
              std::size_t& scanned) {
    Relation rel;
    auto vars = tmpl.variables();
    rel.columns.assign(vars.begin(), vars.end());

    auto consider = [&](const Hyperedge& edge) {
        if (pushdown && !passes_filters(edge, tmpl, pattern)) return;
        ++scanned;
        for (const auto& pred : tmpl.predicates) {
            if (!pred.matches(edge.attributes)) return;
        }
        match_edge(edge, tmpl, rel, rel.rows);
    };

    if (pushdown && (pattern.at_time || pattern.window)) {
        Timestamp lo = Timestamp::min();
        Timestamp hi = Timestamp::infinity();
        if (pattern.window) {
            lo = pattern.window->start;
            hi = pattern.window->end;
        }
        if (pattern.at_time) {
            lo = std::max(lo, *pattern.at_time);
            hi = std::min(hi, *pattern.at_time);
        }
        std::vector<EdgeId> candidates;
        if (lo <= hi) snapshot.valid_time_index().overlapping(lo, hi, [&](const EdgeId& id) { candidates.push_back(id); });
        std::sort(candidates.begin(), candidates.end());
        for (const auto& id : candidates) consider(snapshot.edge(id));
    } else {
        for (const auto& [id, state] : snapshot.edges()) consider(state.effective);
    }
    std::sort(rel.rows.begin(), rel.rows.end());
    rel.rows.erase(std::unique(rel.rows.begin(), rel.rows.end()), rel.rows.end());
    return rel;
}

std::vector<std::pair<int, int>> shared_columns(const Relation& a, const Relation& b) {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < a.columns.size(); ++i) {
        int j = b.column(a.columns[i]);
        if (j >= 0) out.emplace_back(static_cast<int>(i), j);
    }
    return out;
}

std::string key_of(const Relation::Row& row, const std::vector<std::pair<int, int>>& cols, bool first) {
    std::string key;
    for (const auto& [a, b] : cols) {
        key += row.values[static_cast<std::size_t>(first ? a : b)];
        key.push_back('\x1f');
    }
    return key;
}

// keep ⋉ probe on their shared variables.
void semijoin(Relation& keep, const Relation& probe) {
    auto cols = shared_columns(keep, probe);
    std::unordered_set<std::string> keys;
    for (const auto& row : probe.rows) keys.insert(key_of(row, cols, false));
    std::erase_if(keep.rows, [&](const Relation::Row& row) { return !keys.count(key_of(row, cols, true)); });
}

bool binding_passes(const Snapshot& snapshot, const Binding& b, const PatternQuery& pattern) {
    for (std::size_t i = 0; i < b.edges.size(); ++i) {
        if (!passes_filters(snapshot.edge(b.edges[i]), pattern.templates[i], pattern)) return false;
    }
    return true;
}

void nested_loops(const std::vector<Relation>& rels, std::vector<Binding>& out) {
    Binding partial;
    partial.edges.resize(rels.size());
    std::function<void(std::size_t)> step = [&](std::size_t i) {
        if (i == rels.size()) {
            out.push_back(partial);
            return;
        }
        for (const auto& row : rels[i].rows) {
            std::vector<std::string> added;
            bool ok = true;
            for (std::size_t c = 0; c < rels[i].columns.size() && ok; ++c) {
                auto [it, fresh] = partial.values.try_emplace(rels[i].columns[c], row.values[c]);
                if (fresh) {
                    added.push_back(rels[i].columns[c]);
                } else if (it->second != row.values[c]) {
                    ok = false;
                }
            }
            if (ok) {
                partial.edges[i] = row.edge;
                step(i + 1);
            }
            for (const auto& v : added) partial.values.erase(v);
        }
    };
    step(0);
}

}  // namespace

QueryResult evaluate(const Snapshot& snapshot, const PatternQuery& pattern, const EvaluateOptions& options) {
    QueryResult result;
    const std::size_t n = pattern.templates.size();
    if (n == 0) return result;

    for (const auto& t : pattern.templates) {
        for (const auto& term : t.terms) {
            if (!term.is_variable() && !snapshot.resolves(term.name)) {
                throw Error(ErrorCode::UnknownConstant, "no entity or relationship named '" + term.name + "'");
            }
        }
    }

    AcyclicityResult shape = is_alpha_acyclic(pattern);
    if (!shape.acyclic && !options.allow_cyclic) {
        std::string names;
        for (int w : shape.witness) names += (names.empty() ? "" : ", ") + std::to_string(w + 1);
        throw Error(ErrorCode::CyclicPattern, "pattern is not alpha-acyclic (templates " + names + " form a cycle)");
    }

    std::vector<Relation> rels;
    result.stats.leaf_scanned.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        rels.push_back(scan(snapshot, pattern.templates[i], pattern, options.pushdown, result.stats.leaf_scanned[i]));
        result.stats.leaf_tuples.push_back(rels.back().rows.size());
    }

    std::vector<Binding> bindings;
    if (shape.acyclic) {
        result.stats.join_tree = true;
        const JoinTree& tree = shape.tree;
        std::vector<int> order = tree.preorder();
        // Full reducer: children into parents bottom-up, then parents into
        // children top-down.
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int p = tree.parent[static_cast<std::size_t>(*it)];
            if (p >= 0) semijoin(rels[static_cast<std::size_t>(p)], rels[static_cast<std::size_t>(*it)]);
        }
        for (int node : order) {
            int p = tree.parent[static_cast<std::size_t>(node)];
            if (p >= 0) semijoin(rels[static_cast<std::size_t>(node)], rels[static_cast<std::size_t>(p)]);
        }
        for (const auto& r : rels) result.stats.reduced_tuples.push_back(r.rows.size());

        // Enumerate in preorder; each node only needs to agree with its
        // parent on their shared variables.
        std::vector<std::unordered_multimap<std::string, std::size_t>> index(n);
        std::vector<std::vector<std::pair<int, int>>> link(n);
        for (int node : order) {
            int p = tree.parent[static_cast<std::size_t>(node)];
            if (p < 0) continue;
            auto& rel = rels[static_cast<std::size_t>(node)];
            link[static_cast<std::size_t>(node)] = shared_columns(rels[static_cast<std::size_t>(p)], rel);
            for (std::size_t r = 0; r < rel.rows.size(); ++r)
                index[static_cast<std::size_t>(node)].emplace(key_of(rel.rows[r], link[static_cast<std::size_t>(node)], false), r);
        }
        std::vector<const Relation::Row*> chosen(n, nullptr);
        std::function<void(std::size_t)> step = [&](std::size_t k) {
            if (k == order.size()) {
                Binding b;
                b.edges.resize(n);
                for (std::size_t i = 0; i < n; ++i) {
                    b.edges[i] = chosen[i]->edge;
                    for (std::size_t c = 0; c < rels[i].columns.size(); ++c)
                        b.values.emplace(rels[i].columns[c], chosen[i]->values[c]);
                }
                bindings.push_back(std::move(b));
                return;
            }
            auto node = static_cast<std::size_t>(order[k]);
            int p = tree.parent[node];
            if (p < 0) {
                for (const auto& row : rels[node].rows) {
                    chosen[node] = &row;
                    step(k + 1);
                }
                return;
            }
            auto [lo, hi] = index[node].equal_range(key_of(*chosen[static_cast<std::size_t>(p)], link[node], true));
            for (auto it = lo; it != hi; ++it) {
                chosen[node] = &rels[node].rows[it->second];
                step(k + 1);
            }
        };
        step(0);
    } else {
        nested_loops(rels, bindings);
    }

    if (!options.pushdown) {
        std::erase_if(bindings, [&](const Binding& b) { return !binding_passes(snapshot, b, pattern); });
    }
    std::sort(bindings.begin(), bindings.end());
    bindings.erase(std::unique(bindings.begin(), bindings.end()), bindings.end());
    result.bindings = std::move(bindings);
    return result;
}

}  // namespace atch
