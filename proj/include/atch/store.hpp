#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "atch/canonical.hpp"
#include "atch/interval_index.hpp"
#include "atch/model.hpp"

namespace atch {

struct Termination {
    EdgeId id;
    Timestamp end;

    bool operator==(const Termination&) const = default;
};

using Payload = std::variant<Vertex, Hyperedge, Termination, CausalLink, ConfidenceAssessment, ContextRule>;

// Tag names used in the log file, indexed like Payload's alternatives.
std::string_view payload_tag(const Payload& payload);

struct EventRecord {
    std::uint64_t seq = 0;
    Timestamp tx_time;
    Payload payload;

    bool operator==(const EventRecord&) const = default;
};

// One record per line: seq, tx_time, tag and canonical payload separated by
// tabs. The line carries no trailing newline.
std::string to_log_line(const EventRecord& record);
// Throws PositionedError(ParseError) pointing at line_no.
EventRecord parse_log_line(std::string_view line, int line_no);
std::vector<EventRecord> read_log(std::istream& in);
std::vector<EventRecord> read_log_file(const std::filesystem::path& path);

enum class ConfidencePolicy {
    // Latest assessment by transaction time, falling back to the edge's own κ.
    LatestAssessment,
    // Noisy-OR over all assessments, falling back to the edge's own κ.
    NoisyOrAssessments,
};

struct EdgeState {
    Hyperedge original;
    // Valid-time end narrowed by terminations, confidence per policy.
    Hyperedge effective;
    std::vector<ConfidenceAssessment> assessments;
    std::uint64_t added_seq = 0;
};

struct ClaimKey {
    std::string proposition;
    Polarity polarity;

    auto operator<=>(const ClaimKey&) const = default;
};

// Mutable materialized state; the store's write path and snapshot replay
// both go through apply(), so validation is identical in both.
class State {
public:
    explicit State(ConfidencePolicy policy = ConfidencePolicy::LatestAssessment) : policy_(policy) {}

    // Validates then applies; throws Error and leaves the state untouched on
    // failure.
    void apply(const EventRecord& record);

    bool resolves(std::string_view id) const;
    bool has_edge(std::string_view id) const;
    bool reachable(const EdgeId& from, const EdgeId& to) const;

    ConfidencePolicy policy() const { return policy_; }

private:
    friend class Snapshot;

    void refresh_effective(EdgeState& state) const;

    ConfidencePolicy policy_;
    std::uint64_t as_of_seq_ = 0;
    std::map<EntityId, Vertex, std::less<>> vertices_;
    std::map<EdgeId, EdgeState, std::less<>> edges_;
    std::vector<CausalLink> links_;
    std::map<EdgeId, std::vector<std::size_t>, std::less<>> forward_;
    std::map<EdgeId, std::vector<std::size_t>, std::less<>> reverse_;
    std::vector<ContextRule> rules_;
    std::map<ClaimKey, std::vector<EdgeId>> claims_;
};

// Immutable view of the store as of one sequence number. Cheap to copy and
// safe to share between threads.
class Snapshot {
public:
    Snapshot();
    explicit Snapshot(State state);

    std::uint64_t as_of_seq() const { return data_->state.as_of_seq_; }

    // Effective edge (terminations and assessments applied), or nullptr.
    const Hyperedge* find_edge(std::string_view id) const;
    // Throws Error(UnknownEdge).
    const Hyperedge& edge(std::string_view id) const;
    const EdgeState& edge_state(std::string_view id) const;
    const Vertex* find_vertex(std::string_view id) const;
    bool resolves(std::string_view id) const { return data_->state.resolves(id); }

    const std::map<EdgeId, EdgeState, std::less<>>& edges() const { return data_->state.edges_; }
    const std::map<EntityId, Vertex, std::less<>>& vertices() const { return data_->state.vertices_; }
    const std::vector<CausalLink>& links() const { return data_->state.links_; }
    const std::vector<ContextRule>& context_rules() const { return data_->state.rules_; }

    // Links whose cause (resp. effect) is the given edge, in append order.
    std::vector<const CausalLink*> links_from(std::string_view id) const;
    std::vector<const CausalLink*> links_to(std::string_view id) const;

    const std::vector<EdgeId>& claim_members(const std::string& proposition, Polarity polarity) const;
    std::vector<std::string> propositions() const;

    // Interval index over effective valid time.
    const IntervalIndex<EdgeId>& valid_time_index() const { return data_->index; }

    // Deep, deterministic rendering used for equality checks.
    canonical::Json to_canonical() const;

private:
    struct Data {
        State state;
        IntervalIndex<EdgeId> index;
    };
    std::shared_ptr<const Data> data_;
};

// Retrieve: the effective edge by identifier. Throws Error(UnknownEdge).
Hyperedge get(const Snapshot& snapshot, std::string_view id);

struct StoreOptions {
    using Clock = std::function<Timestamp()>;

    ConfidencePolicy policy = ConfidencePolicy::LatestAssessment;
    // Defaults to the system clock.
    Clock clock;
};

// Append-only event log with a single writer. Every accepted record is
// written through to the backing file when one is attached.
class Store {
public:
    using Clock = StoreOptions::Clock;
    using Options = StoreOptions;

    Store();
    explicit Store(Options options);
    Store(Store&&) noexcept;
    Store& operator=(Store&&) noexcept;
    ~Store();

    // Replays an existing log (if present) and appends to it afterwards.
    static Store open(const std::filesystem::path& path, Options options = {});
    // Replays records verbatim (seq and tx_time preserved).
    static Store replay(const std::vector<EventRecord>& records, Options options = {});

    std::uint64_t append(Payload payload);

    std::uint64_t add_vertex(Vertex vertex);
    std::uint64_t add_edge(Hyperedge edge);
    std::uint64_t terminate(const EdgeId& id, Timestamp end);
    std::uint64_t add_link(CausalLink link);
    std::uint64_t add_assessment(ConfidenceAssessment assessment);
    std::uint64_t add_context_rule(ContextRule rule);

    // Re-appends a record from another log under the next seq, keeping its
    // tx_time unless that would move transaction time backwards.
    std::uint64_t ingest(const EventRecord& record);

    Snapshot snapshot() const;
    // Throws Error(SeqOutOfRange).
    Snapshot snapshot(std::uint64_t as_of_seq) const;
    // Latest state whose records all carry tx_time <= t.
    Snapshot snapshot_at_tx(Timestamp t) const;

    Hyperedge get(std::string_view id) const;

    const std::vector<EventRecord>& records() const { return records_; }
    std::uint64_t last_seq() const { return records_.empty() ? 0 : records_.back().seq; }
    Timestamp last_tx_time() const { return records_.empty() ? Timestamp::min() : records_.back().tx_time; }

    // Full log text, one line per record, each newline-terminated.
    std::string serialize() const;

private:
    std::uint64_t commit(EventRecord record);

    Options options_;
    State state_;
    std::vector<EventRecord> records_;
    std::unique_ptr<std::ofstream> file_;
    std::unique_ptr<std::mutex> write_mutex_;
    mutable std::optional<Snapshot> latest_;
};

}  // namespace atch
