#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "atch/causal.hpp"
#include "atch/store.hpp"

namespace atch {

// "label(0.73) --[0.89]--> label(0.95)"; nodes without a string label
// attribute fall back to their id.
std::string render_chain(const Snapshot& snapshot, const CausalChain& chain);
std::string display_name(const Snapshot& snapshot, const EdgeId& id);

struct BenchmarkQuery {
    std::string id;
    std::string description;
    std::string pillars;
    // DSL text when the query goes through the pattern engine.
    std::string dsl;
    std::set<EdgeId> result;
    std::set<EdgeId> expected;
    std::optional<double> value;
    std::optional<double> expected_value;
    std::optional<CausalChain> chain;
    std::vector<std::string> notes;
    bool pass = false;
};

struct BenchmarkReport {
    std::vector<BenchmarkQuery> queries;

    bool all_pass() const;
};

inline constexpr std::string_view kBenchmarkAsOf = "2024-08-15";

// Causal history of the malpractice finding as the store knew it at as_of:
// transaction-time snapshot at as_of, valid-time filter at as_of.
BenchmarkQuery causal_history_query(const Store& store, Timestamp as_of);

// Q1-Q7 against the benchmark fixture. Throws Error(FixtureMissing) when a
// required record is absent.
BenchmarkReport run_benchmark_suite(const Store& store);

}  // namespace atch
