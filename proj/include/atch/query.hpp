#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "atch/store.hpp"

namespace atch {

struct Term {
    enum class Kind { Variable, Constant };

    Kind kind = Kind::Variable;
    std::string name;
    // Required participant role; only variables carry one in the DSL.
    std::optional<std::string> role;

    bool is_variable() const { return kind == Kind::Variable; }
    bool operator==(const Term&) const = default;
};

// Matches an edge when the terms embed injectively into its participant
// positions (order ignored) and every predicate holds.
struct EdgeTemplate {
    std::vector<Term> terms;
    std::vector<AttrPredicate> predicates;
    // Strict lower bound on effective confidence.
    std::optional<double> min_confidence;

    std::set<std::string> variables() const;
    bool operator==(const EdgeTemplate&) const = default;
};

struct PatternQuery {
    std::vector<EdgeTemplate> templates;
    // Matched edges must overlap the window / be valid at at_time.
    std::optional<TimeInterval> window;
    std::optional<Timestamp> at_time;
    std::optional<double> min_confidence;

    std::set<std::string> variables() const;
    bool operator==(const PatternQuery&) const = default;
};

// Throws PositionedError(SyntaxError) with a 1-based line and column.
PatternQuery parse_query(std::string_view text);

struct JoinTree {
    // parent[i] is the template i was folded into; -1 for the root.
    std::vector<int> parent;
    int root = -1;

    std::vector<std::vector<int>> children() const;
    // Templates ordered so that every parent precedes its children.
    std::vector<int> preorder() const;
};

struct AcyclicityResult {
    bool acyclic = false;
    JoinTree tree;
    // Templates left once GYO reduction stalls; empty when acyclic.
    std::vector<int> witness;
};

AcyclicityResult is_alpha_acyclic(const std::vector<std::set<std::string>>& hyperedges);
AcyclicityResult is_alpha_acyclic(const PatternQuery& pattern);

// Every variable's occurrences form a connected subtree.
bool running_intersection(const JoinTree& tree, const std::vector<std::set<std::string>>& hyperedges);

struct Binding {
    std::map<std::string, std::string> values;
    // One matched edge per template, in template order.
    std::vector<EdgeId> edges;

    auto operator<=>(const Binding&) const = default;
};

struct EvaluateOptions {
    // Apply temporal and confidence predicates during the leaf scans.
    bool pushdown = true;
    // Evaluate cyclic patterns by nested loops instead of rejecting them.
    bool allow_cyclic = false;
};

struct EvaluationStats {
    // Edges handed to template matching, per template.
    std::vector<std::size_t> leaf_scanned;
    // Tuples produced by each leaf, before and after the semijoin passes.
    std::vector<std::size_t> leaf_tuples;
    std::vector<std::size_t> reduced_tuples;
    bool join_tree = false;
};

struct QueryResult {
    std::vector<Binding> bindings;
    EvaluationStats stats;
};

// Bindings come back sorted and distinct. Throws Error(CyclicPattern) and
// Error(UnknownConstant).
QueryResult evaluate(const Snapshot& snapshot, const PatternQuery& pattern, const EvaluateOptions& options = {});

// True when the edge passes the pattern's window, instant and both
// confidence floors.
bool passes_filters(const Hyperedge& edge, const EdgeTemplate& tmpl, const PatternQuery& pattern);

}  // namespace atch
