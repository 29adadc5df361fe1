#include "atch/cli.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "atch/benchmark.hpp"
#include "atch/causal.hpp"
#include "atch/conflict.hpp"
#include "atch/projection.hpp"
#include "atch/query.hpp"
#include "atch/temporal.hpp"

namespace atch {

namespace {

namespace fs = std::filesystem;
using canonical::Json;

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Advisory lock on the store file itself: shared for readers, exclusive
// for commands that append.
class FileLock {
public:
    FileLock(const fs::path& path, bool exclusive) {
        fd_ = ::open(path.c_str(), exclusive ? (O_RDWR | O_CREAT) : O_RDONLY, 0644);
        if (fd_ >= 0) ::flock(fd_, exclusive ? LOCK_EX : LOCK_SH);
    }
    ~FileLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void print_table(std::ostream& out, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c > 0) s += "  ";
            s += cells[c];
            if (c + 1 < cells.size()) s.append(width[c] - cells[c].size(), ' ');
        }
        out << s << '\n';
    };
    line(header);
    std::vector<std::string> rule;
    for (auto w : width) rule.emplace_back(w, '-');
    line(rule);
    for (const auto& r : rows) line(r);
}

struct Context {
    std::string store_path;
    std::string format = "table";
    std::ostream* out = nullptr;

    bool canonical() const { return format == "canonical"; }
    void emit(const Json& j) const { *out << canonical::dump(j) << '\n'; }

    fs::path path() const {
        if (store_path.empty()) throw UsageError("no store given; pass --store or set ATCH_STORE");
        fs::path p(store_path);
        fs::path parent = p.has_parent_path() ? p.parent_path() : fs::path(".");
        if (!fs::is_directory(parent)) throw UsageError("store directory '" + parent.string() + "' does not exist");
        return p;
    }

    Store read_only() const {
        fs::path p = path();
        if (!fs::exists(p)) return Store();
        FileLock lock(p, false);
        return Store::replay(read_log_file(p));
    }
};

StoreOptions pinned_clock(const std::optional<std::string>& tx_time) {
    StoreOptions o;
    if (tx_time) {
        Timestamp t = Timestamp::parse_or_throw(*tx_time);
        o.clock = [t] { return t; };
    }
    return o;
}

Timestamp ts(const std::string& text) { return Timestamp::parse_or_throw(text); }

Json edge_rows_json(const Snapshot& snap, const std::set<EdgeId>& ids) {
    Json arr = Json::array();
    for (const auto& id : ids) {
        const Hyperedge& e = snap.edge(id);
        arr.push_back({{"confidence", e.confidence},
                       {"id", id},
                       {"valid_from", e.valid_time.start.to_string()},
                       {"valid_to", e.valid_time.end.to_string()}});
    }
    return arr;
}

void print_edges(const Context& ctx, const Snapshot& snap, const std::set<EdgeId>& ids) {
    if (ctx.canonical()) {
        ctx.emit({{"count", ids.size()}, {"edges", edge_rows_json(snap, ids)}});
        return;
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& id : ids) {
        const Hyperedge& e = snap.edge(id);
        rows.push_back({id, display_name(snap, id), fixed(e.confidence), e.valid_time.start.to_string(),
                        e.valid_time.end.to_string()});
    }
    print_table(*ctx.out, {"id", "label", "confidence", "valid_from", "valid_to"}, rows);
    *ctx.out << ids.size() << " edge(s)\n";
}

Json chain_json(const CausalChain& chain) {
    Json nodes = Json::array();
    for (const auto& n : chain.nodes) nodes.push_back({{"confidence", n.node_confidence}, {"edge", n.edge}});
    Json links = Json::array();
    for (const auto& l : chain.links) {
        links.push_back({{"confidence", l.link_confidence}, {"context", l.context_modifier}, {"mechanism", l.mechanism}});
    }
    return {{"chain_confidence", chain.chain_confidence}, {"links", links}, {"nodes", nodes}};
}

Json cluster_json(const ClaimCluster& c) {
    return {{"accumulated", c.accumulated}, {"members", c.members}, {"polarity", std::string(to_string(c.polarity))}};
}

Json partition_json(const std::vector<PartitionBranch>& branches);

Json node_json(const PartitionNode& node) {
    return {{"attribute", node.attribute}, {"branches", partition_json(node.branches)}, {"gain", node.gain}};
}

Json partition_json(const std::vector<PartitionBranch>& branches) {
    Json arr = Json::array();
    for (const auto& b : branches) {
        Json j{{"label", b.label}, {"negative", b.counts.negative}, {"positive", b.counts.positive}};
        if (b.child) j["child"] = node_json(*b.child);
        arr.push_back(std::move(j));
    }
    return arr;
}

void print_tree(std::ostream& out, const PartitionNode& node, int indent) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    out << pad << node.attribute << " (IG " << fixed(node.gain, 3) << ")\n";
    for (const auto& b : node.branches) {
        out << pad << "  = " << b.label << ": +" << b.counts.positive << " / -" << b.counts.negative << '\n';
        if (b.child) print_tree(out, *b.child, indent + 2);
    }
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string s;
    for (const auto& i : items) {
        if (!s.empty()) s += sep;
        s += i;
    }
    return s;
}

std::string join(const std::set<std::string>& items, std::string_view sep) {
    return join(std::vector<std::string>(items.begin(), items.end()), sep);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"atch: attributed temporal causal hypergraph store"};
    app.require_subcommand(1);
    Context ctx;
    ctx.out = &out;
    app.add_option("--store", ctx.store_path, "Store log file")->envname("ATCH_STORE");
    app.add_option("--format", ctx.format, "Output format")->check(CLI::IsMember({"table", "canonical"}));

    std::function<int()> action;

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Append the records of a log file");
    std::string ingest_file;
    ingest->add_option("file", ingest_file)->required();
    ingest->callback([&] {
        action = [&] {
            auto records = read_log_file(ingest_file);
            fs::path p = ctx.path();
            FileLock lock(p, true);
            Store store = Store::open(p);
            // Dry run first so a bad record leaves the store untouched.
            Store trial = Store::replay(store.records());
            for (const auto& r : records) trial.ingest(r);
            std::map<std::string, std::size_t> counts;
            for (auto tag : {"AddVertex", "AddHyperedge", "TerminateHyperedge", "AddCausalLink", "AddAssessment",
                             "AddContextRule"})
                counts[tag] = 0;
            for (const auto& r : records) {
                store.ingest(r);
                ++counts[std::string(payload_tag(r.payload))];
            }
            if (ctx.canonical()) {
                ctx.emit({{"appended", records.size()}, {"by_type", counts}});
            } else {
                std::vector<std::vector<std::string>> rows;
                for (const auto& [tag, n] : counts) rows.push_back({tag, std::to_string(n)});
                print_table(out, {"record", "count"}, rows);
                out << records.size() << " record(s) appended\n";
            }
            return kExitOk;
        };
    });

    // query
    auto* query = app.add_subcommand("query", "Evaluate a pattern query");
    std::string dsl;
    std::optional<std::string> q_at;
    std::optional<double> q_min;
    std::vector<std::string> q_during;
    bool edges_only = false, bruteforce = false, no_pushdown = false;
    query->add_option("dsl", dsl)->required();
    query->add_option("--at-time", q_at, "Override the valid-time instant");
    query->add_option("--during", q_during, "Override the valid-time window")->expected(2);
    query->add_option("--min-conf", q_min, "Override the confidence floor");
    query->add_flag("--edges-only", edges_only, "Print matched edge ids only");
    query->add_flag("--force-bruteforce", bruteforce, "Evaluate cyclic patterns by nested loops");
    query->add_flag("--no-pushdown", no_pushdown, "Filter after the join instead of at the leaves");
    query->callback([&] {
        action = [&] {
            PatternQuery pattern = parse_query(dsl);
            if (q_at) pattern.at_time = ts(*q_at);
            if (!q_during.empty()) {
                TimeInterval w{ts(q_during[0]), ts(q_during[1])};
                if (!w.well_formed()) throw Error(ErrorCode::MalformedInterval, "window start is after its end");
                pattern.window = w;
            }
            if (q_min) pattern.min_confidence = q_min;
            Store store = ctx.read_only();
            Snapshot snap = store.snapshot();
            EvaluateOptions opts;
            opts.allow_cyclic = bruteforce;
            opts.pushdown = !no_pushdown;
            QueryResult result = evaluate(snap, pattern, opts);

            if (edges_only) {
                std::set<EdgeId> ids;
                for (const auto& b : result.bindings) ids.insert(b.edges.begin(), b.edges.end());
                print_edges(ctx, snap, ids);
                return kExitOk;
            }
            if (ctx.canonical()) {
                Json arr = Json::array();
                for (const auto& b : result.bindings) arr.push_back({{"edges", b.edges}, {"values", b.values}});
                ctx.emit({{"bindings", arr}, {"count", result.bindings.size()}});
                return kExitOk;
            }
            std::set<std::string> vars = pattern.variables();
            std::vector<std::string> header(vars.begin(), vars.end());
            for (std::size_t i = 0; i < pattern.templates.size(); ++i) header.push_back("edge" + std::to_string(i + 1));
            std::vector<std::vector<std::string>> rows;
            for (const auto& b : result.bindings) {
                std::vector<std::string> row;
                for (const auto& v : vars) row.push_back(b.values.at(v));
                row.insert(row.end(), b.edges.begin(), b.edges.end());
                rows.push_back(std::move(row));
            }
            print_table(out, header, rows);
            out << result.bindings.size() << " binding(s)\n";
            return kExitOk;
        };
    });

    // trace
    auto* trace = app.add_subcommand("trace", "Trace the causal chain of an edge");
    std::string trace_id;
    TraceOptions topts;
    std::optional<std::string> t_as_of, t_direction;
    std::optional<double> t_threshold;
    bool with_confidence = false;
    trace->add_option("edge", trace_id)->required();
    trace->add_option("--depth", topts.depth, "Maximum number of links")->capture_default_str();
    trace->add_option("--as-of", t_as_of, "What the store knew, and what held, at this time");
    trace->add_option("--threshold", t_threshold, "Prune branches below this chain confidence");
    trace->add_option("--direction", t_direction, "causes (default) or effects")
        ->check(CLI::IsMember({"causes", "effects"}));
    trace->add_flag("--confidence", with_confidence, "Show confidences");
    trace->callback([&] {
        action = [&] {
            if (topts.depth < 0) throw UsageError("--depth must be non-negative");
            Store store = ctx.read_only();
            Snapshot snap = store.snapshot();
            if (t_as_of) {
                topts.as_of = ts(*t_as_of);
                snap = store.snapshot_at_tx(*topts.as_of);
            }
            topts.threshold = t_threshold;
            if (t_direction == "effects") topts.direction = TraceDirection::Effects;
            TraceResult result = trace_causal_chain(snap, trace_id, topts);
            auto chains = result.chains();
            if (ctx.canonical()) {
                Json arr = Json::array();
                for (const auto& c : chains) arr.push_back(chain_json(c));
                ctx.emit({{"chains", arr}, {"root", trace_id}});
                return kExitOk;
            }
            for (const auto& c : chains) {
                if (with_confidence) {
                    out << render_chain(snap, c) << '\n';
                    out << "Chain confidence: " << fixed(c.chain_confidence) << '\n';
                } else {
                    std::vector<std::string> names;
                    for (const auto& n : c.nodes) names.push_back(display_name(snap, n.edge));
                    out << join(names, " --> ") << '\n';
                }
            }
            return kExitOk;
        };
    });

    // at-time / during
    auto* at = app.add_subcommand("at-time", "Edges valid at an instant");
    std::string at_ts;
    std::optional<double> at_min;
    at->add_option("time", at_ts)->required();
    at->add_option("--min-conf", at_min, "Only edges with confidence above this");
    at->callback([&] {
        action = [&] {
            Store store = ctx.read_only();
            Snapshot snap = store.snapshot();
            print_edges(ctx, snap, at_time(snap, ts(at_ts), at_min).edges);
            return kExitOk;
        };
    });

    auto* during = app.add_subcommand("during", "Edges valid somewhere in a closed interval");
    std::string d_start, d_end;
    during->add_option("start", d_start)->required();
    during->add_option("end", d_end)->required();
    during->callback([&] {
        action = [&] {
            Store store = ctx.read_only();
            Snapshot snap = store.snapshot();
            print_edges(ctx, snap, valid_in_interval(snap, {ts(d_start), ts(d_end)}));
            return kExitOk;
        };
    });

    // discover
    auto* discover = app.add_subcommand("discover", "Look for the attribute behind a contradiction");
    std::string proposition;
    double theta = 0.9, member_floor = 0.0;
    int max_depth = kDefaultPartitionDepth;
    bool do_split = false;
    std::optional<std::string> tx_time;
    discover->add_option("proposition", proposition)->required();
    discover->add_option("--theta", theta, "Contradiction threshold")->capture_default_str();
    discover->add_option("--member-floor", member_floor, "Minimum confidence for cluster membership")
        ->capture_default_str();
    discover->add_option("--depth", max_depth, "Partition tree depth")->capture_default_str();
    discover->add_flag("--split", do_split, "Append the context-specific edges");
    discover->add_option("--tx-time", tx_time, "Transaction time for appended records");
    discover->callback([&] {
        action = [&] {
            std::optional<FileLock> lock;
            if (do_split) lock.emplace(ctx.path(), true);
            Store store = do_split ? Store::open(ctx.path(), pinned_clock(tx_time)) : ctx.read_only();
            Snapshot snap = store.snapshot();
            auto signal = detect_contradiction(snap, proposition, theta, member_floor);
            if (!signal) {
                if (ctx.canonical()) {
                    ctx.emit({{"proposition", proposition}, {"signal", false}});
                } else {
                    out << "no signal for '" << proposition << "' at theta " << fixed(theta, 3) << '\n';
                }
                return kExitOk;
            }
            DiscoveryResult d = discover_hidden_context(snap, *signal, max_depth);
            std::vector<Hyperedge> planned;
            if (!d.no_separator) planned = do_split ? split_on_context(store, *signal, d) : plan_context_split(snap, *signal, d);

            if (ctx.canonical()) {
                Json split = Json::array();
                for (const auto& e : planned) {
                    split.push_back({{"confidence", e.confidence},
                                     {"id", e.id},
                                     {"polarity", std::string(to_string(e.claim->polarity))}});
                }
                Json j{{"best_attribute", d.best_attribute},
                       {"gain", d.gain},
                       {"label_entropy", d.label_entropy},
                       {"no_separator", d.no_separator},
                       {"partition", partition_json(d.partition)},
                       {"proposition", proposition},
                       {"refuting", cluster_json(signal->refuting)},
                       {"signal", true},
                       {"split", split},
                       {"split_applied", do_split && !planned.empty()},
                       {"supporting", cluster_json(signal->supporting)}};
                if (d.residual_tree) j["residual_tree"] = node_json(*d.residual_tree);
                ctx.emit(j);
                return kExitOk;
            }
            out << "Contradiction on '" << proposition << "': supports " << fixed(signal->supporting.accumulated, 5)
                << " (" << signal->supporting.members.size() << " members) vs refutes "
                << fixed(signal->refuting.accumulated, 5) << " (" << signal->refuting.members.size() << " members)\n";
            if (d.no_separator) {
                out << "NoSeparator: no attribute separates the clusters\n";
                return kExitOk;
            }
            out << "Best attribute: " << d.best_attribute << " (IG " << fixed(d.gain, 3) << " of "
                << fixed(d.label_entropy, 3) << " bits)\n";
            std::map<std::string, const Hyperedge*> by_label;
            for (const auto& e : planned) by_label[e.id.substr(e.id.rfind('=') + 1)] = &e;
            std::vector<std::vector<std::string>> rows;
            for (const auto& b : d.partition) {
                auto it = by_label.find(b.label);
                std::string kappa = it == by_label.end() ? "-" : fixed(it->second->confidence, 5);
                std::string polarity = it == by_label.end() ? "-" : std::string(to_string(it->second->claim->polarity));
                rows.push_back({b.label, std::to_string(b.counts.positive), std::to_string(b.counts.negative), polarity,
                                kappa});
            }
            print_table(out, {d.best_attribute, "supports", "refutes", "majority", "confidence"}, rows);
            if (d.residual_tree) {
                out << "Residual partition:\n";
                print_tree(out, *d.residual_tree, 1);
            }
            if (do_split) out << planned.size() << " context-specific edge(s) appended\n";
            return kExitOk;
        };
    });

    // resolve
    auto* resolve_cmd = app.add_subcommand("resolve", "Decide between two opposing claims");
    std::string ra, rb;
    resolve_cmd->add_option("a", ra)->required();
    resolve_cmd->add_option("b", rb)->required();
    resolve_cmd->callback([&] {
        action = [&] {
            Store store = ctx.read_only();
            Verdict v = resolve(store.snapshot(), ra, rb);
            if (ctx.canonical()) {
                ctx.emit({{"decision", std::string(to_string(v.decision))},
                          {"rationale", v.rationale},
                          {"tier", std::string(to_string(v.tier))}});
                return kExitOk;
            }
            out << "Decision: " << to_string(v.decision) << " (tier: " << to_string(v.tier) << ")\n";
            for (const auto& r : v.rationale) out << "  " << r << '\n';
            return kExitOk;
        };
    });

    // audit
    auto* audit = app.add_subcommand("audit", "Trace two conflicting edges back to faulty sources");
    std::string aa, ab;
    double floor = 0.5;
    bool apply = false;
    audit->add_option("a", aa)->required();
    audit->add_option("b", ab)->required();
    audit->add_option("--floor", floor, "Confidence below which an ancestor counts as faulty")->capture_default_str();
    audit->add_flag("--apply", apply, "Append explanation edges");
    audit->add_option("--tx-time", tx_time, "Transaction time for appended records");
    audit->callback([&] {
        action = [&] {
            std::optional<FileLock> lock;
            if (apply) lock.emplace(ctx.path(), true);
            Store store = apply ? Store::open(ctx.path(), pinned_clock(tx_time)) : ctx.read_only();
            AuditReport r = apply ? causal_audit(store, aa, ab, floor) : audit_chains(store.snapshot(), aa, ab, floor);
            if (ctx.canonical()) {
                Json j{{"chain_a", r.chain_a},         {"chain_b", r.chain_b},   {"explanations", r.explanations},
                       {"faulty_a", r.faulty_a},       {"faulty_b", r.faulty_b}, {"recommendation", nullptr}};
                if (r.recommendation) j["recommendation"] = std::string(to_string(*r.recommendation));
                ctx.emit(j);
                return kExitOk;
            }
            out << aa << ": " << join(r.chain_a, " <- ") << '\n';
            out << "  faulty: " << (r.faulty_a.empty() ? "none" : join(r.faulty_a, ", ")) << '\n';
            out << ab << ": " << join(r.chain_b, " <- ") << '\n';
            out << "  faulty: " << (r.faulty_b.empty() ? "none" : join(r.faulty_b, ", ")) << '\n';
            out << "Recommendation: " << (r.recommendation ? std::string(to_string(*r.recommendation)) : "none")
                << '\n';
            for (const auto& e : r.explanations) out << "  explanation: " << e << '\n';
            return kExitOk;
        };
    });

    // bench
    auto* bench = app.add_subcommand("bench", "Run the Q1-Q7 benchmark queries");
    bench->callback([&] {
        action = [&] {
            Store store = ctx.read_only();
            BenchmarkReport report = run_benchmark_suite(store);
            if (ctx.canonical()) {
                Json arr = Json::array();
                for (const auto& q : report.queries) {
                    Json j{{"description", q.description}, {"expected", q.expected}, {"id", q.id},
                           {"notes", q.notes},             {"pass", q.pass},         {"pillars", q.pillars},
                           {"result", q.result}};
                    if (q.value) j["value"] = *q.value;
                    if (!q.dsl.empty()) j["dsl"] = q.dsl;
                    arr.push_back(std::move(j));
                }
                ctx.emit({{"all_pass", report.all_pass()}, {"queries", arr}});
            } else {
                std::vector<std::vector<std::string>> rows;
                for (const auto& q : report.queries) {
                    std::string result = q.value ? fixed(*q.value, 6) : join(q.result, ",");
                    rows.push_back({q.id, q.description, q.pillars, result, q.pass ? "PASS" : "FAIL"});
                }
                print_table(out, {"query", "description", "pillars", "result", "status"}, rows);
                for (const auto& q : report.queries) {
                    for (const auto& n : q.notes) out << q.id << ": " << n << '\n';
                }
            }
            return report.all_pass() ? kExitOk : kExitDomain;
        };
    });

    // loss
    auto* loss = app.add_subcommand("loss", "Information lost by binary projection");
    std::vector<std::string> missing;
    loss->add_option("--missing", missing, "Pillars absent from the target model (P1..P4)")->delimiter(',');
    loss->callback([&] {
        action = [&] {
            std::set<Pillar> pillars;
            for (const auto& m : missing) {
                auto p = parse_pillar(m);
                if (!p) throw UsageError("unknown pillar '" + m + "'");
                pillars.insert(*p);
            }
            Store store = ctx.read_only();
            Snapshot snap = store.snapshot();
            LossReport report = ambiguity_bound(snap);
            std::optional<GapReport> gap;
            if (!pillars.empty()) gap = expressiveness_gap(snap, pillars);
            if (ctx.canonical()) {
                Json j = to_canonical(report);
                if (gap) j["gap"] = to_canonical(*gap);
                ctx.emit(j);
                return kExitOk;
            }
            out << "Edges: " << report.per_edge_bits.size() << ", average arity " << fixed(report.avg_arity) << '\n';
            out << "Ambiguity: " << report.total_bits << " bits (lower bound " << fixed(report.convexity_bound) << ")\n";
            const auto& c = report.component_bits;
            print_table(out, {"component", "bits"},
                        {{"structural", fixed(c.structural, 0)},
                         {"temporal", fixed(c.temporal, 0)},
                         {"confidence", fixed(c.confidence, 0)},
                         {"causal", fixed(c.causal, 0)}});
            out << "Component sizes are an MDL proxy (artifact-defined)\n";
            if (gap) {
                std::vector<std::string> names;
                for (Pillar p : gap->missing) names.emplace_back(to_string(p));
                out << "Gap without " << join(names, ",") << ": " << fixed(gap->total_bits, 0) << " bits\n";
            }
            return kExitOk;
        };
    });

    // stats
    auto* stats = app.add_subcommand("stats", "Store summary");
    stats->callback([&] {
        action = [&] {
            Store store = ctx.read_only();
            Snapshot snap = store.snapshot();
            std::vector<std::pair<std::string, std::string>> facts{
                {"records", std::to_string(store.records().size())},
                {"last_seq", std::to_string(store.last_seq())},
                {"vertices", std::to_string(snap.vertices().size())},
                {"edges", std::to_string(snap.edges().size())},
                {"links", std::to_string(snap.links().size())},
                {"context_rules", std::to_string(snap.context_rules().size())},
                {"propositions", std::to_string(snap.propositions().size())},
            };
            if (!store.records().empty()) {
                facts.emplace_back("first_tx", store.records().front().tx_time.to_string());
                facts.emplace_back("last_tx", store.last_tx_time().to_string());
            }
            if (ctx.canonical()) {
                Json j = Json::object();
                for (const auto& [k, v] : facts) j[k] = v;
                ctx.emit(j);
                return kExitOk;
            }
            std::vector<std::vector<std::string>> rows;
            for (const auto& [k, v] : facts) rows.push_back({k, v});
            print_table(out, {"item", "value"}, rows);
            return kExitOk;
        };
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        return action ? action() : kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        bool parse = e.code() == ErrorCode::ParseError || e.code() == ErrorCode::SyntaxError;
        return parse ? kExitUsage : kExitDomain;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
}

}  // namespace atch
