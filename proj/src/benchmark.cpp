#include "atch/benchmark.hpp"

#include <cmath>
#include <cstdio>

#include "atch/query.hpp"
#include "atch/temporal.hpp"

namespace atch {

namespace {

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

BenchmarkQuery make_query(std::string id, std::string description, std::string pillars, std::string dsl = {}) {
    BenchmarkQuery q;
    q.id = std::move(id);
    q.description = std::move(description);
    q.pillars = std::move(pillars);
    q.dsl = std::move(dsl);
    return q;
}

bool close(double a, double b) { return std::fabs(a - b) <= 1e-9; }

std::set<EdgeId> first_edges(const QueryResult& r) {
    std::set<EdgeId> out;
    for (const auto& b : r.bindings) out.insert(b.edges.front());
    return out;
}

BenchmarkQuery pattern_query(const Snapshot& snap, std::string id, std::string description, std::string pillars,
                             std::string dsl, std::set<EdgeId> expected) {
    BenchmarkQuery q = make_query(std::move(id), std::move(description), std::move(pillars), std::move(dsl));
    q.result = first_edges(evaluate(snap, parse_query(q.dsl)));
    q.expected = std::move(expected);
    q.pass = q.result == q.expected;
    return q;
}

const std::vector<std::string>& required_edges() {
    static const std::vector<std::string> ids{
        "team_meeting",   "meeting_pair",      "meeting_standup",  "emp_engineer", "emp_manager",
        "supply_chain",   "driver_push_e1",    "windows_update_e2", "print_failure_e3", "prescription",
        "reaction",       "malpractice_finding",
    };
    return ids;
}

}  // namespace

std::string display_name(const Snapshot& snapshot, const EdgeId& id) {
    if (const Hyperedge* e = snapshot.find_edge(id)) {
        auto it = e->attributes.find("label");
        if (it != e->attributes.end()) {
            if (auto s = std::get_if<std::string>(&it->second)) return *s;
        }
    }
    return id;
}

std::string render_chain(const Snapshot& snapshot, const CausalChain& chain) {
    std::string out;
    for (std::size_t i = 0; i < chain.nodes.size(); ++i) {
        if (i > 0) out += " --[" + two_decimals(chain.links[i - 1].effective()) + "]--> ";
        out += display_name(snapshot, chain.nodes[i].edge) + "(" + two_decimals(chain.nodes[i].node_confidence) + ")";
    }
    return out;
}

bool BenchmarkReport::all_pass() const {
    for (const auto& q : queries) {
        if (!q.pass) return false;
    }
    return !queries.empty();
}

BenchmarkQuery causal_history_query(const Store& store, Timestamp as_of) {
    BenchmarkQuery q = make_query("Q7", "Causal history at time T with confidence", "All");
    q.expected = {"prescription", "reaction", "malpractice_finding"};
    q.expected_value = 0.73 * 0.89 * 0.78;
    Snapshot known = store.snapshot_at_tx(as_of);
    if (!known.find_edge("malpractice_finding")) {
        q.notes.push_back("malpractice_finding not yet recorded at " + as_of.to_string());
        return q;
    }
    TraceOptions options;
    options.as_of = as_of;
    TraceResult trace = trace_causal_chain(known, "malpractice_finding", options);
    q.result = trace.nodes();
    auto chains = trace.chains();
    if (!chains.empty()) {
        const CausalChain* best = &chains.front();
        for (const auto& c : chains) {
            if (c.nodes.size() > best->nodes.size()) best = &c;
        }
        q.chain = *best;
        q.value = best->chain_confidence;
        q.notes.push_back(render_chain(known, *best));
        q.notes.push_back("Chain confidence: " + two_decimals(best->chain_confidence));
    }
    q.pass = q.result == q.expected && q.value && close(*q.value, *q.expected_value);
    return q;
}

BenchmarkReport run_benchmark_suite(const Store& store) {
    Snapshot snap = store.snapshot();
    for (const auto& id : required_edges()) {
        if (!snap.find_edge(id)) throw Error(ErrorCode::FixtureMissing, "benchmark fixture lacks '" + id + "'");
    }
    BenchmarkReport report;

    report.queries.push_back(pattern_query(snap, "Q1", "3-way meeting with attribute", "1",
                                           "match (a:attendee, b:attendee, c:attendee, r:room) "
                                           "{kind = meeting, productive = true}",
                                           {"team_meeting"}));

    {
        auto q = pattern_query(snap, "Q2", "Status of X on date D", "2",
                               "match (Alice, org:employer) {kind = employment} at time 2023-01-01",
                               {"emp_engineer"});
        for (const auto& id : q.result) {
            auto it = snap.edge(id).attributes.find("status");
            if (it != snap.edge(id).attributes.end()) q.notes.push_back(id + ": status = " + display(it->second));
        }
        report.queries.push_back(std::move(q));
    }

    report.queries.push_back(pattern_query(snap, "Q3", "Relationships with confidence > 0.8", "3",
                                           "match (x) where conf > 0.8",
                                           {"emp_engineer", "emp_manager", "meeting_standup", "team_meeting",
                                            "supply_chain", "driver_push_e1", "windows_update_e2", "reaction"}));

    {
        BenchmarkQuery q = make_query("Q4", "What caused relationship R?", "4");
        q.result = causal_ancestors(snap, "print_failure_e3", LinkKind::Causes);
        q.expected = {"driver_push_e1", "windows_update_e2"};
        q.pass = q.result == q.expected;
        report.queries.push_back(std::move(q));
    }

    {
        BenchmarkQuery q = make_query("Q5", "Propagate confidence through chain", "3,4");
        CausalChain chain = build_chain(snap, {"prescription", "reaction", "malpractice_finding"});
        q.result = {"prescription", "reaction", "malpractice_finding"};
        q.expected = q.result;
        q.value = chain.chain_confidence;
        q.expected_value = 0.73 * 0.89 * 0.78;
        q.notes.push_back(render_chain(snap, chain));
        q.chain = std::move(chain);
        q.pass = close(*q.value, *q.expected_value);
        report.queries.push_back(std::move(q));
    }

    {
        BenchmarkQuery q = make_query("Q6", "Relationships valid in interval I", "1,2");
        q.result = valid_in_interval(snap, {Timestamp::parse_or_throw("2024-03-18T00:00:00Z"),
                                            Timestamp::parse_or_throw("2024-03-18T04:00:00Z")});
        q.expected = {"emp_manager", "supply_chain", "driver_push_e1", "windows_update_e2", "prescription"};
        q.pass = q.result == q.expected;
        report.queries.push_back(std::move(q));
    }

    report.queries.push_back(causal_history_query(store, Timestamp::parse_or_throw(kBenchmarkAsOf)));
    return report;
}

}  // namespace atch
