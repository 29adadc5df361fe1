#include <gtest/gtest.h>

#include "atch/fixtures.hpp"
#include "atch/temporal.hpp"
#include "oracles.hpp"

using namespace atch;

namespace {

Timestamp ts(const char* s) { return Timestamp::parse_or_throw(s); }

}  // namespace

TEST(AtTime, OpenEndedEdgePersists) {
    Snapshot snap = fixtures::it_incident().snapshot();
    EXPECT_TRUE(at_time(snap, ts("2024-03-18")).edges.count("driver_push_e1"));
    EXPECT_TRUE(at_time(snap, ts("2031-01-01")).edges.count("driver_push_e1"));
    EXPECT_FALSE(at_time(snap, ts("2024-02-25")).edges.count("driver_push_e1"));
    auto r = at_time(snap, ts("2024-03-18T02:00:00Z"));
    EXPECT_EQ(r.edges, (std::set<EdgeId>{"driver_push_e1", "windows_update_e2"}));
    EXPECT_EQ(r.as_of_seq, snap.as_of_seq());
    EXPECT_EQ(r.as_of_valid_time, ts("2024-03-18T02:00:00Z"));
}

TEST(AtTime, TerminationHidesLaterInstants) {
    Store s = fixtures::inhibitor();
    Snapshot snap = s.snapshot();
    EXPECT_TRUE(at_time(snap, ts("2024-04-15")).edges.count("broken_wing"));
    EXPECT_FALSE(at_time(snap, ts("2024-04-15T00:00:01Z")).edges.count("broken_wing"));
}

TEST(AtTime, ConfidenceFloorIsStrict) {
    Snapshot snap = fixtures::it_incident().snapshot();
    auto r = at_time(snap, ts("2024-03-18T09:00:00Z"), 0.78);
    EXPECT_EQ(r.edges, (std::set<EdgeId>{"driver_push_e1"}));
}

TEST(AtTime, MatchesLinearScan) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        std::mt19937_64 rng(seed);
        gen::StoreShape shape;
        shape.edges = 50;
        Store s = gen::random_store(rng, shape);
        Snapshot snap = s.snapshot();
        for (int d = -2; d < 100; d += 3) {
            EXPECT_EQ(at_time(snap, gen::day(d)).edges, oracle::scan_at(snap, gen::day(d)));
        }
    }
}

TEST(Interval, ClosedIntersection) {
    Snapshot snap = fixtures::it_incident().snapshot();
    Timestamp start = ts("2024-03-18T01:00:00Z");
    EXPECT_TRUE(valid_in_interval(snap, {start, start}).count("windows_update_e2"));
    EXPECT_FALSE(valid_in_interval(snap, {ts("2024-03-19"), ts("2024-03-20")}).count("windows_update_e2"));
    EXPECT_THROW(valid_in_interval(snap, {ts("2024-03-20"), ts("2024-03-19")}), Error);
}

TEST(Interval, MatchesLinearScanAndIsMonotone) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        std::mt19937_64 rng(seed * 31 + 1);
        gen::StoreShape shape;
        shape.edges = 50;
        Snapshot snap = gen::random_store(rng, shape).snapshot();
        for (int k = 0; k < 30; ++k) {
            int a = static_cast<int>(rng() % 100) - 5;
            int b = a + static_cast<int>(rng() % 20);
            auto inner = valid_in_interval(snap, {gen::day(a), gen::day(b)});
            EXPECT_EQ(inner, oracle::scan_interval(snap, gen::day(a), gen::day(b)));
            auto outer = valid_in_interval(snap, {gen::day(a - 3), gen::day(b + 3)});
            EXPECT_TRUE(std::includes(outer.begin(), outer.end(), inner.begin(), inner.end()));
        }
    }
}

TEST(IntervalIndex, AgreesWithScanOnDenseOverlaps) {
    std::mt19937_64 rng(99);
    for (int n : {0, 1, 2, 3, 7, 8, 9, 15, 16, 17, 33, 100, 257}) {
        std::vector<IntervalIndex<int>::Item> items;
        for (int i = 0; i < n; ++i) {
            std::int64_t a = static_cast<std::int64_t>(rng() % 1000);
            std::int64_t b = rng() % 5 == 0 ? Timestamp::infinity().micros() : a + static_cast<std::int64_t>(rng() % 100);
            items.push_back({{Timestamp(a), Timestamp(b)}, i, {}});
        }
        IntervalIndex<int> index(items);
        for (int q = 0; q < 200; ++q) {
            std::int64_t lo = static_cast<std::int64_t>(rng() % 1200) - 100;
            std::int64_t hi = lo + static_cast<std::int64_t>(rng() % 50);
            std::set<int> got, want;
            index.overlapping(Timestamp(lo), Timestamp(hi), [&](int p) { EXPECT_TRUE(got.insert(p).second); });
            for (const auto& it : items)
                if (it.interval.intersects({Timestamp(lo), Timestamp(hi)})) want.insert(it.payload);
            EXPECT_EQ(got, want) << "n=" << n;
        }
    }
}

TEST(BlastRadius, ChainAndIsolatedEdge) {
    Snapshot snap = fixtures::it_incident().snapshot();
    EXPECT_EQ(blast_radius(snap, "windows_update_e2"), (std::set<EdgeId>{"driver_push_e1", "print_failure_e3"}));
    Snapshot meet = fixtures::meeting().snapshot();
    EXPECT_TRUE(blast_radius(meet, "team_meeting").empty());
    EXPECT_THROW(blast_radius(snap, "nope"), Error);
}

TEST(BlastRadius, MatchesFloydWarshall) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        std::mt19937_64 rng(seed + 1000);
        gen::StoreShape shape;
        shape.edges = 25;
        shape.links = 30;
        Snapshot snap = gen::random_store(rng, shape).snapshot();
        oracle::Closure closure(snap);
        oracle::Closure causes(snap, LinkKind::Causes);
        for (const auto& [id, st] : snap.edges()) {
            auto anc = closure.ancestors(id), desc = closure.descendants(id);
            std::set<EdgeId> both = anc;
            both.insert(desc.begin(), desc.end());
            EXPECT_EQ(blast_radius(snap, id), both);
            EXPECT_EQ(causal_ancestors(snap, id), anc);
            EXPECT_EQ(causal_descendants(snap, id), desc);
            EXPECT_EQ(causal_ancestors(snap, id, LinkKind::Causes), causes.ancestors(id));
        }
    }
}

// Appends that never touch the probe (nor anything causally tied to it)
// leave its at_time membership alone.
TEST(FrameProperty, UnrelatedAppendsDoNotMoveTheProbe) {
    std::mt19937_64 rng(4242);
    for (int round = 0; round < 50; ++round) {
        Store s(gen::fixed_clock());
        s.add_vertex({"P", {}});
        s.add_vertex({"X", {}});
        Hyperedge probe;
        probe.id = "probe";
        probe.participants = participants_of({"P"});
        probe.valid_time = {gen::day(10), rng() % 2 ? Timestamp::infinity() : gen::day(40)};
        s.add_edge(probe);
        std::vector<Timestamp> probes;
        for (int d = 0; d < 60; d += 2) probes.push_back(gen::day(d));
        auto membership = [&](const Snapshot& snap) {
            std::vector<bool> v;
            for (auto t : probes) v.push_back(at_time(snap, t).edges.count("probe") > 0);
            return v;
        };
        auto baseline = membership(s.snapshot());
        int made = 0;
        std::set<std::string> linked;
        for (int k = 0; k < 30; ++k) {
            switch (rng() % 4) {
                case 0:
                case 1: {
                    Hyperedge e;
                    e.id = "u" + std::to_string(made++);
                    e.participants = participants_of({"X"});
                    e.valid_time = {gen::day(static_cast<int>(rng() % 50))};
                    s.add_edge(e);
                    break;
                }
                case 2:
                    if (made > 1) {
                        std::string a = "u" + std::to_string(rng() % made), b = "u" + std::to_string(rng() % made);
                        if (a < b && linked.insert(a + ">" + b).second) s.add_link({a, b, "m", 0.5});
                    }
                    break;
                default:
                    if (made > 0) {
                        std::string id = "u" + std::to_string(rng() % made);
                        s.terminate(id, Timestamp::infinity());
                    }
            }
            EXPECT_EQ(membership(s.snapshot()), baseline);
        }
    }
}
