#include <gtest/gtest.h>

#include "atch/benchmark.hpp"
#include "atch/fixtures.hpp"
#include "atch/temporal.hpp"

using namespace atch;

namespace {

Timestamp ts(const char* s) { return Timestamp::parse_or_throw(s); }

const BenchmarkQuery& find(const BenchmarkReport& r, const std::string& id) {
    for (const auto& q : r.queries)
        if (q.id == id) return q;
    throw std::runtime_error("missing query " + id);
}

}  // namespace

TEST(Benchmark, AllQueriesPass) {
    Store store = fixtures::benchmark();
    BenchmarkReport r = run_benchmark_suite(store);
    ASSERT_EQ(r.queries.size(), 7u);
    for (const auto& q : r.queries) EXPECT_TRUE(q.pass) << q.id;
    EXPECT_TRUE(r.all_pass());

    EXPECT_EQ(find(r, "Q1").result, (std::set<EdgeId>{"team_meeting"}));
    EXPECT_EQ(find(r, "Q2").result, (std::set<EdgeId>{"emp_engineer"}));
    EXPECT_NEAR(*find(r, "Q5").value, 0.506766, 1e-9);
    const auto& q7 = find(r, "Q7");
    ASSERT_TRUE(q7.chain);
    EXPECT_NEAR(q7.chain->chain_confidence, 0.506766, 1e-9);
}

TEST(Benchmark, HighConfidenceScanIsTheDefinition) {
    Store store = fixtures::benchmark();
    Snapshot snap = store.snapshot();
    std::set<EdgeId> want;
    for (const auto& [id, st] : snap.edges())
        if (st.effective.confidence > 0.8) want.insert(id);
    EXPECT_EQ(find(run_benchmark_suite(store), "Q3").result, want);
}

TEST(Benchmark, IntervalQueryMatchesTemporalEngine) {
    Store store = fixtures::benchmark();
    auto suite = run_benchmark_suite(store);
    const auto& q6 = find(suite, "Q6");
    EXPECT_EQ(q6.result, valid_in_interval(store.snapshot(), {ts("2024-03-18T00:00:00Z"), ts("2024-03-18T04:00:00Z")}));
}

TEST(Benchmark, CausalHistoryIsBitemporal) {
    Store store = fixtures::benchmark();
    BenchmarkQuery now = causal_history_query(store, ts("2024-08-15"));
    EXPECT_TRUE(now.result.count("malpractice_finding"));
    EXPECT_EQ(now.result, (std::set<EdgeId>{"prescription", "reaction", "malpractice_finding"}));
    // Before the finding was recorded the store could not trace it.
    BenchmarkQuery before = causal_history_query(store, ts("2024-07-15"));
    EXPECT_FALSE(before.result.count("malpractice_finding"));
    EXPECT_FALSE(before.pass);
}

TEST(Benchmark, MissingFixtureIsReported) {
    Store store = fixtures::meeting();
    try {
        run_benchmark_suite(store);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::FixtureMissing);
    }
}

TEST(Benchmark, ChainRendering) {
    Snapshot snap = fixtures::malpractice().snapshot();
    CausalChain chain = build_chain(snap, {"prescription", "reaction", "malpractice_finding"});
    EXPECT_EQ(render_chain(snap, chain), "prescription(0.73) --[0.89]--> reaction(0.95) --[0.78]--> finding(0.62)");
    EXPECT_EQ(display_name(snap, "malpractice_finding"), "finding");
}
