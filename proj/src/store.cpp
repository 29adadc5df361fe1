#include "atch/store.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <sstream>

#include "atch/error.hpp"

namespace atch {

namespace {

constexpr std::string_view kTags[] = {"AddVertex",     "AddHyperedge",  "TerminateHyperedge",
                                      "AddCausalLink", "AddAssessment", "AddContextRule"};

canonical::Json encode_payload(const Payload& payload) {
    return std::visit(
        [](const auto& p) -> canonical::Json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Termination>) {
                return canonical::Json{{"end", p.end.to_string()}, {"id", p.id}};
            } else {
                return canonical::encode(p);
            }
        },
        payload);
}

Payload decode_payload(std::string_view tag, const canonical::Json& json) {
    if (tag == "AddVertex") return canonical::decode_vertex(json);
    if (tag == "AddHyperedge") return canonical::decode_edge(json);
    if (tag == "TerminateHyperedge") {
        if (!json.contains("id") || !json.contains("end") || !json["id"].is_string() || !json["end"].is_string()) {
            throw Error(ErrorCode::ParseError, "termination needs 'id' and 'end'");
        }
        return Termination{json["id"].get<std::string>(), Timestamp::parse_or_throw(json["end"].get<std::string>())};
    }
    if (tag == "AddCausalLink") return canonical::decode_link(json);
    if (tag == "AddAssessment") return canonical::decode_assessment(json);
    if (tag == "AddContextRule") return canonical::decode_rule(json);
    throw Error(ErrorCode::ParseError, "unknown payload tag '" + std::string(tag) + "'");
}

[[noreturn]] void fail_validation(const std::vector<Violation>& violations) {
    std::string message;
    for (const auto& v : violations) {
        if (!message.empty()) message += "; ";
        message += v.detail;
    }
    ErrorCode code = violations.front().code;
    // Cycles and duplicate ids keep their own codes; everything else is a
    // validation failure with the underlying invariant in the message.
    if (code != ErrorCode::CausalCycle && code != ErrorCode::DuplicateId) code = ErrorCode::ValidationFailed;
    throw Error(code, message);
}

}  // namespace

std::string_view payload_tag(const Payload& payload) { return kTags[payload.index()]; }

std::string to_log_line(const EventRecord& record) {
    std::string line = std::to_string(record.seq);
    line += '\t';
    line += record.tx_time.to_string();
    line += '\t';
    line += payload_tag(record.payload);
    line += '\t';
    line += canonical::dump(encode_payload(record.payload));
    return line;
}

EventRecord parse_log_line(std::string_view line, int line_no) {
    auto fail = [&](const std::string& what) -> EventRecord {
        throw PositionedError(ErrorCode::ParseError, what, line_no, 0);
    };
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::string_view fields[3];
    std::size_t pos = 0;
    for (auto& f : fields) {
        std::size_t tab = line.find('\t', pos);
        if (tab == std::string_view::npos) return fail("expected 4 tab-separated fields");
        f = line.substr(pos, tab - pos);
        pos = tab + 1;
    }
    EventRecord record;
    auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), record.seq);
    if (ec != std::errc{} || ptr != fields[0].data() + fields[0].size()) return fail("malformed seq");
    auto tx = Timestamp::parse(fields[1]);
    if (!tx || tx->is_infinite()) return fail("malformed tx_time");
    record.tx_time = *tx;
    try {
        record.payload = decode_payload(fields[2], canonical::parse(std::string(line.substr(pos))));
        if (auto* a = std::get_if<ConfidenceAssessment>(&record.payload)) a->tx_time = record.tx_time;
    } catch (const PositionedError&) {
        throw;
    } catch (const Error& e) {
        return fail(e.what());
    }
    return record;
}

std::vector<EventRecord> read_log(std::istream& in) {
    std::vector<EventRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        out.push_back(parse_log_line(line, line_no));
    }
    return out;
}

std::vector<EventRecord> read_log_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
    return read_log(in);
}

// ---------------------------------------------------------------------------
// State

bool State::resolves(std::string_view id) const {
    return vertices_.find(id) != vertices_.end() || edges_.find(id) != edges_.end();
}

bool State::has_edge(std::string_view id) const { return edges_.find(id) != edges_.end(); }

bool State::reachable(const EdgeId& from, const EdgeId& to) const {
    std::vector<EdgeId> stack{from};
    std::map<EdgeId, bool, std::less<>> seen;
    while (!stack.empty()) {
        EdgeId cur = std::move(stack.back());
        stack.pop_back();
        if (cur == to) return true;
        if (seen[cur]) continue;
        seen[cur] = true;
        auto it = forward_.find(cur);
        if (it == forward_.end()) continue;
        for (std::size_t idx : it->second) stack.push_back(links_[idx].effect);
    }
    return false;
}

void State::refresh_effective(EdgeState& state) const {
    double confidence = state.original.confidence;
    if (!state.assessments.empty()) {
        if (policy_ == ConfidencePolicy::LatestAssessment) {
            // Assessments are kept in append order, which is tx-time order.
            confidence = state.assessments.back().value;
        } else {
            double miss = 1.0;
            for (const auto& a : state.assessments) miss *= (1.0 - a.value);
            confidence = 1.0 - miss;
        }
    }
    state.effective.confidence = confidence;
}

void State::apply(const EventRecord& record) {
    if (record.seq <= as_of_seq_) {
        throw Error(ErrorCode::ValidationFailed, "record seq " + std::to_string(record.seq) + " is not increasing");
    }
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Vertex>) {
                if (p.id.empty()) fail_validation({{ErrorCode::ValidationFailed, "vertex id is empty"}});
                if (resolves(p.id)) fail_validation({{ErrorCode::DuplicateId, "id '" + p.id + "' already in use"}});
                vertices_.emplace(p.id, p);
            } else if constexpr (std::is_same_v<T, Hyperedge>) {
                if (p.id.empty()) fail_validation({{ErrorCode::ValidationFailed, "edge id is empty"}});
                if (resolves(p.id)) fail_validation({{ErrorCode::DuplicateId, "id '" + p.id + "' already in use"}});
                auto violations = validate(p, [this](std::string_view id) { return resolves(id); });
                if (!violations.empty()) fail_validation(violations);
                EdgeState st;
                st.original = p;
                st.original.tx_time = TimeInterval{record.tx_time, Timestamp::infinity()};
                st.effective = st.original;
                st.added_seq = record.seq;
                if (p.claim) claims_[ClaimKey{p.claim->proposition, p.claim->polarity}].push_back(p.id);
                edges_.emplace(p.id, std::move(st));
            } else if constexpr (std::is_same_v<T, Termination>) {
                auto it = edges_.find(p.id);
                if (it == edges_.end()) throw Error(ErrorCode::UnknownEdge, "no edge '" + p.id + "'");
                EdgeState& st = it->second;
                if (p.end < st.original.valid_time.start) {
                    throw Error(ErrorCode::EndBeforeStart, "termination of '" + p.id + "' at " + p.end.to_string() +
                                                               " precedes its start");
                }
                if (p.end < st.effective.valid_time.end) st.effective.valid_time.end = p.end;
            } else if constexpr (std::is_same_v<T, CausalLink>) {
                auto violations = validate(p);
                if (!violations.empty()) fail_validation(violations);
                if (!has_edge(p.cause)) throw Error(ErrorCode::UnknownEdge, "no edge '" + p.cause + "'");
                if (!has_edge(p.effect)) throw Error(ErrorCode::UnknownEdge, "no edge '" + p.effect + "'");
                for (const auto& l : links_) {
                    if (l.cause == p.cause && l.effect == p.effect && l.kind == p.kind) {
                        fail_validation({{ErrorCode::DuplicateId, "link " + p.cause + " -> " + p.effect + " exists"}});
                    }
                }
                if (reachable(p.effect, p.cause)) {
                    fail_validation({{ErrorCode::CausalCycle,
                                      "link " + p.cause + " -> " + p.effect + " would close a causal cycle"}});
                }
                links_.push_back(p);
                forward_[p.cause].push_back(links_.size() - 1);
                reverse_[p.effect].push_back(links_.size() - 1);
            } else if constexpr (std::is_same_v<T, ConfidenceAssessment>) {
                auto it = edges_.find(p.target);
                if (it == edges_.end()) throw Error(ErrorCode::UnknownEdge, "no edge '" + p.target + "'");
                if (!confidence_in_range(p.value)) {
                    fail_validation({{ErrorCode::ConfidenceOutOfRange, "assessment value outside [0, 1]"}});
                }
                ConfidenceAssessment a = p;
                a.tx_time = record.tx_time;
                it->second.assessments.push_back(std::move(a));
                refresh_effective(it->second);
            } else if constexpr (std::is_same_v<T, ContextRule>) {
                auto violations = validate(p);
                if (!violations.empty()) fail_validation(violations);
                for (const auto& r : rules_) {
                    if (r.id == p.id) fail_validation({{ErrorCode::DuplicateId, "rule '" + p.id + "' exists"}});
                }
                rules_.push_back(p);
            }
        },
        record.payload);
    as_of_seq_ = record.seq;
}

// ---------------------------------------------------------------------------
// Snapshot

Snapshot::Snapshot() : Snapshot(State{}) {}

Snapshot::Snapshot(State state) {
    std::vector<IntervalIndex<EdgeId>::Item> items;
    items.reserve(state.edges_.size());
    for (const auto& [id, st] : state.edges_) items.push_back({st.effective.valid_time, id, {}});
    auto data = std::make_shared<Data>(Data{std::move(state), IntervalIndex<EdgeId>(std::move(items))});
    data_ = std::move(data);
}

const Hyperedge* Snapshot::find_edge(std::string_view id) const {
    auto it = data_->state.edges_.find(id);
    return it == data_->state.edges_.end() ? nullptr : &it->second.effective;
}

const Hyperedge& Snapshot::edge(std::string_view id) const { return edge_state(id).effective; }

const EdgeState& Snapshot::edge_state(std::string_view id) const {
    auto it = data_->state.edges_.find(id);
    if (it == data_->state.edges_.end()) throw Error(ErrorCode::UnknownEdge, "no edge '" + std::string(id) + "'");
    return it->second;
}

const Vertex* Snapshot::find_vertex(std::string_view id) const {
    auto it = data_->state.vertices_.find(id);
    return it == data_->state.vertices_.end() ? nullptr : &it->second;
}

std::vector<const CausalLink*> Snapshot::links_from(std::string_view id) const {
    std::vector<const CausalLink*> out;
    auto it = data_->state.forward_.find(id);
    if (it != data_->state.forward_.end()) {
        for (std::size_t idx : it->second) out.push_back(&data_->state.links_[idx]);
    }
    return out;
}

std::vector<const CausalLink*> Snapshot::links_to(std::string_view id) const {
    std::vector<const CausalLink*> out;
    auto it = data_->state.reverse_.find(id);
    if (it != data_->state.reverse_.end()) {
        for (std::size_t idx : it->second) out.push_back(&data_->state.links_[idx]);
    }
    return out;
}

const std::vector<EdgeId>& Snapshot::claim_members(const std::string& proposition, Polarity polarity) const {
    static const std::vector<EdgeId> kEmpty;
    auto it = data_->state.claims_.find(ClaimKey{proposition, polarity});
    return it == data_->state.claims_.end() ? kEmpty : it->second;
}

std::vector<std::string> Snapshot::propositions() const {
    std::vector<std::string> out;
    for (const auto& [key, members] : data_->state.claims_) {
        if (out.empty() || out.back() != key.proposition) out.push_back(key.proposition);
    }
    return out;
}

canonical::Json Snapshot::to_canonical() const {
    using canonical::Json;
    const State& s = data_->state;
    Json vertices = Json::array();
    for (const auto& [id, v] : s.vertices_) vertices.push_back(canonical::encode(v));
    Json edges = Json::array();
    for (const auto& [id, st] : s.edges_) {
        Json e = canonical::encode(st.effective);
        e["tx_time"] = Json{{"end", st.effective.tx_time->end.to_string()},
                            {"start", st.effective.tx_time->start.to_string()}};
        e["declared_end"] = st.original.valid_time.end.to_string();
        e["declared_confidence"] = st.original.confidence;
        e["added_seq"] = st.added_seq;
        Json assessments = Json::array();
        for (const auto& a : st.assessments) {
            Json item = canonical::encode(a);
            item["tx_time"] = a.tx_time.to_string();
            assessments.push_back(std::move(item));
        }
        e["assessments"] = std::move(assessments);
        edges.push_back(std::move(e));
    }
    Json links = Json::array();
    for (const auto& l : s.links_) links.push_back(canonical::encode(l));
    Json rules = Json::array();
    for (const auto& r : s.rules_) rules.push_back(canonical::encode(r));
    return Json{{"as_of_seq", s.as_of_seq_}, {"context_rules", std::move(rules)}, {"edges", std::move(edges)},
                {"links", std::move(links)},  {"vertices", std::move(vertices)}};
}

Hyperedge get(const Snapshot& snapshot, std::string_view id) { return snapshot.edge(id); }

// ---------------------------------------------------------------------------
// Store

Store::Store() : Store(Options{}) {}

Store::Store(Options options)
    : options_(std::move(options)), state_(options_.policy), write_mutex_(std::make_unique<std::mutex>()) {
    if (!options_.clock) options_.clock = &Timestamp::now;
}

Store::Store(Store&&) noexcept = default;
Store& Store::operator=(Store&&) noexcept = default;
Store::~Store() = default;

Store Store::replay(const std::vector<EventRecord>& records, Options options) {
    Store store(std::move(options));
    for (const auto& r : records) {
        if (!store.records_.empty() && r.tx_time < store.records_.back().tx_time) {
            throw Error(ErrorCode::ValidationFailed,
                        "record " + std::to_string(r.seq) + " moves transaction time backwards");
        }
        store.state_.apply(r);
        store.records_.push_back(r);
    }
    return store;
}

Store Store::open(const std::filesystem::path& path, Options options) {
    Store store = std::filesystem::exists(path) ? replay(read_log_file(path), std::move(options))
                                                : Store(std::move(options));
    store.file_ = std::make_unique<std::ofstream>(path, std::ios::app | std::ios::binary);
    if (!*store.file_) throw Error(ErrorCode::ParseError, "cannot open '" + path.string() + "' for append");
    return store;
}

std::uint64_t Store::commit(EventRecord record) {
    if (auto* edge = std::get_if<Hyperedge>(&record.payload)) edge->tx_time.reset();
    if (auto* a = std::get_if<ConfidenceAssessment>(&record.payload)) a->tx_time = record.tx_time;
    state_.apply(record);
    records_.push_back(record);
    latest_.reset();
    if (file_) {
        *file_ << to_log_line(records_.back()) << '\n';
        file_->flush();
    }
    return records_.back().seq;
}

std::uint64_t Store::append(Payload payload) {
    std::lock_guard lock(*write_mutex_);
    Timestamp tx = options_.clock();
    if (!records_.empty() && tx < records_.back().tx_time) tx = records_.back().tx_time;
    if (auto* edge = std::get_if<Hyperedge>(&payload); edge && edge->id.empty()) edge->id = generate_uuid();
    return commit(EventRecord{last_seq() + 1, tx, std::move(payload)});
}

std::uint64_t Store::ingest(const EventRecord& record) {
    std::lock_guard lock(*write_mutex_);
    Timestamp tx = record.tx_time;
    if (!records_.empty() && tx < records_.back().tx_time) tx = records_.back().tx_time;
    return commit(EventRecord{last_seq() + 1, tx, record.payload});
}

std::uint64_t Store::add_vertex(Vertex vertex) { return append(std::move(vertex)); }
std::uint64_t Store::add_edge(Hyperedge edge) { return append(std::move(edge)); }
std::uint64_t Store::terminate(const EdgeId& id, Timestamp end) { return append(Termination{id, end}); }
std::uint64_t Store::add_link(CausalLink link) { return append(std::move(link)); }
std::uint64_t Store::add_assessment(ConfidenceAssessment assessment) { return append(std::move(assessment)); }
std::uint64_t Store::add_context_rule(ContextRule rule) { return append(std::move(rule)); }

Snapshot Store::snapshot() const {
    std::lock_guard lock(*write_mutex_);
    if (!latest_) latest_ = Snapshot(state_);
    return *latest_;
}

Snapshot Store::snapshot(std::uint64_t as_of_seq) const {
    if (as_of_seq > last_seq()) {
        throw Error(ErrorCode::SeqOutOfRange,
                    "seq " + std::to_string(as_of_seq) + " beyond last " + std::to_string(last_seq()));
    }
    if (as_of_seq == last_seq()) return snapshot();
    State replayed(options_.policy);
    for (const auto& r : records_) {
        if (r.seq > as_of_seq) break;
        replayed.apply(r);
    }
    return Snapshot(std::move(replayed));
}

Snapshot Store::snapshot_at_tx(Timestamp t) const {
    std::uint64_t seq = 0;
    for (const auto& r : records_) {
        if (r.tx_time > t) break;
        seq = r.seq;
    }
    return snapshot(seq);
}

Hyperedge Store::get(std::string_view id) const { return snapshot().edge(id); }

std::string Store::serialize() const {
    std::string out;
    for (const auto& r : records_) {
        out += to_log_line(r);
        out += '\n';
    }
    return out;
}

}  // namespace atch
