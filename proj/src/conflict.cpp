#include "atch/conflict.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "atch/causal.hpp"
#include "atch/temporal.hpp"

namespace atch {

namespace {

constexpr double kGainEpsilon = 1e-12;

std::string category_of(const Observation& obs, const std::string& attribute) {
    auto it = obs.attributes.find(attribute);
    return it == obs.attributes.end() ? std::string(kMissingCategory) : category_key(it->second);
}

std::string category_of(const PartitionBranch& branch) {
    return branch.value ? category_key(*branch.value) : std::string(kMissingCategory);
}

void count(LabelCounts& counts, bool positive) {
    if (positive) {
        ++counts.positive;
    } else {
        ++counts.negative;
    }
}

double partition_gain(const LabelCounts& total, const std::vector<PartitionBranch>& branches) {
    double n = static_cast<double>(total.total());
    double remainder = 0.0;
    for (const auto& b : branches) remainder += (static_cast<double>(b.counts.total()) / n) * label_entropy(b.counts);
    double gain = label_entropy(total) - remainder;
    return gain < 0.0 ? 0.0 : gain;
}

// Sorted by label; labels that would collide fall back to the type-tagged key.
std::vector<PartitionBranch> finish_branches(std::map<std::string, PartitionBranch> by_key) {
    std::map<std::string, int> label_uses;
    for (const auto& [key, b] : by_key) ++label_uses[b.label];
    std::vector<PartitionBranch> out;
    for (auto& [key, b] : by_key) {
        if (label_uses[b.label] > 1) b.label = key;
        out.push_back(std::move(b));
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.label < y.label; });
    return out;
}

const AttributeScore* pick_best(const std::vector<AttributeScore>& scores, const std::set<std::string>& excluded) {
    const AttributeScore* best = nullptr;
    for (const auto& s : scores) {
        if (excluded.count(s.attribute)) continue;
        // Scores arrive in attribute-name order, so ties keep the smaller name.
        if (!best || s.gain > best->gain + kGainEpsilon) best = &s;
    }
    return best;
}

std::shared_ptr<const PartitionNode> grow(std::span<const Observation> observations, const AttributeScore& split,
                                          std::set<std::string> excluded, int depth_left) {
    auto node = std::make_shared<PartitionNode>();
    node->attribute = split.attribute;
    node->gain = split.gain;
    node->branches = split.partition;
    excluded.insert(split.attribute);
    if (depth_left <= 1) return node;
    for (auto& branch : node->branches) {
        if (branch.counts.positive == 0 || branch.counts.negative == 0) continue;
        std::vector<Observation> subset;
        std::string key = category_of(branch);
        for (const auto& obs : observations) {
            if (category_of(obs, split.attribute) == key) subset.push_back(obs);
        }
        auto scores = score_attributes(subset);
        const AttributeScore* next = pick_best(scores, excluded);
        if (!next || next->gain <= kGainEpsilon) continue;
        branch.child = grow(subset, *next, excluded, depth_left - 1);
    }
    return node;
}

const std::set<std::string>& bookkeeping_keys() {
    static const std::set<std::string> keys{"label", "source_priority"};
    return keys;
}

std::optional<double> source_priority(const Hyperedge& e) {
    auto it = e.attributes.find("source_priority");
    if (it == e.attributes.end()) return std::nullopt;
    if (auto i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
    if (auto d = std::get_if<double>(&it->second)) return *d;
    return std::nullopt;
}

}  // namespace

ClaimCluster accumulate_claim(const Snapshot& snapshot, const std::string& proposition, Polarity polarity,
                              double member_floor) {
    ClaimCluster cluster;
    cluster.proposition = proposition;
    cluster.polarity = polarity;
    std::vector<double> confidences;
    for (const auto& id : snapshot.claim_members(proposition, polarity)) {
        double k = snapshot.edge(id).confidence;
        if (k > member_floor) {
            cluster.members.push_back(id);
            confidences.push_back(k);
        }
    }
    cluster.accumulated = noisy_or(confidences);
    return cluster;
}

std::optional<ContradictionSignal> detect_contradiction(const Snapshot& snapshot, const std::string& proposition,
                                                        double theta, double member_floor) {
    if (!(theta > 0.0 && theta < 1.0)) throw Error(ErrorCode::DomainError, "signal threshold must lie in (0, 1)");
    ContradictionSignal signal;
    signal.proposition = proposition;
    signal.threshold = theta;
    signal.supporting = accumulate_claim(snapshot, proposition, Polarity::Supports, member_floor);
    signal.refuting = accumulate_claim(snapshot, proposition, Polarity::Refutes, member_floor);
    if (signal.supporting.accumulated > theta && signal.refuting.accumulated > theta) return signal;
    return std::nullopt;
}

double label_entropy(const LabelCounts& counts) {
    double n = static_cast<double>(counts.total());
    if (n == 0.0) return 0.0;
    double h = 0.0;
    for (std::size_t c : {counts.positive, counts.negative}) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double information_gain(std::span<const Observation> observations, const std::string& attribute) {
    if (observations.empty()) throw Error(ErrorCode::EmptyObservations, "no observations");
    LabelCounts total;
    std::map<std::string, PartitionBranch> by_key;
    for (const auto& obs : observations) {
        count(total, obs.positive);
        auto& branch = by_key[category_of(obs, attribute)];
        count(branch.counts, obs.positive);
    }
    std::vector<PartitionBranch> branches;
    for (auto& [k, b] : by_key) branches.push_back(std::move(b));
    return partition_gain(total, branches);
}

std::vector<AttributeScore> score_attributes(std::span<const Observation> observations) {
    if (observations.empty()) throw Error(ErrorCode::EmptyObservations, "no observations");
    LabelCounts total;
    std::map<std::string, std::map<std::string, PartitionBranch>> tables;
    std::map<std::string, LabelCounts> present;
    for (const auto& obs : observations) {
        count(total, obs.positive);
        for (const auto& [key, value] : obs.attributes) {
            auto [it, fresh] = tables[key].try_emplace(category_key(value));
            if (fresh) {
                it->second.label = display(value);
                it->second.value = value;
            }
            count(it->second.counts, obs.positive);
            count(present[key], obs.positive);
        }
    }
    std::vector<AttributeScore> out;
    for (auto& [key, table] : tables) {
        const LabelCounts& seen = present[key];
        if (seen.total() < total.total()) {
            PartitionBranch missing;
            missing.label = std::string(kMissingCategory);
            missing.counts = {total.positive - seen.positive, total.negative - seen.negative};
            table.emplace(std::string(kMissingCategory), std::move(missing));
        }
        AttributeScore score;
        score.attribute = key;
        score.partition = finish_branches(std::move(table));
        score.gain = partition_gain(total, score.partition);
        out.push_back(std::move(score));
    }
    return out;
}

std::vector<Observation> observations_of(const Snapshot& snapshot, const ContradictionSignal& signal) {
    std::vector<Observation> out;
    for (const auto* cluster : {&signal.supporting, &signal.refuting}) {
        for (const auto& id : cluster->members) {
            const Hyperedge& e = snapshot.edge(id);
            out.push_back({id, cluster->polarity == Polarity::Supports, e.attributes, e.confidence});
        }
    }
    return out;
}

DiscoveryResult discover_hidden_context(std::span<const Observation> observations, int max_depth) {
    if (observations.empty()) throw Error(ErrorCode::EmptyObservations, "contradiction clusters are empty");
    auto scores = score_attributes(observations);
    if (scores.empty()) throw Error(ErrorCode::NoAttributes, "cluster members carry no attributes");
    LabelCounts total;
    for (const auto& obs : observations) count(total, obs.positive);

    DiscoveryResult result;
    result.label_entropy = label_entropy(total);
    const AttributeScore* best = pick_best(scores, {});
    result.best_attribute = best->attribute;
    result.partition = best->partition;
    if (best->gain <= kGainEpsilon) {
        result.gain = 0.0;
        result.no_separator = true;
        return result;
    }
    result.gain = best->gain;
    if (best->gain < result.label_entropy - kGainEpsilon && max_depth > 1) {
        auto tree = grow(observations, *best, {}, max_depth);
        bool any_child = std::any_of(tree->branches.begin(), tree->branches.end(),
                                     [](const PartitionBranch& b) { return b.child != nullptr; });
        if (any_child) result.residual_tree = std::move(tree);
    }
    return result;
}

DiscoveryResult discover_hidden_context(const Snapshot& snapshot, const ContradictionSignal& signal, int max_depth) {
    auto observations = observations_of(snapshot, signal);
    return discover_hidden_context(observations, max_depth);
}

std::vector<Hyperedge> plan_context_split(const Snapshot& snapshot, const ContradictionSignal& signal,
                                          const DiscoveryResult& discovery) {
    if (discovery.no_separator || !(discovery.gain > 0.0)) {
        throw Error(ErrorCode::ZeroGain, "no attribute separates the clusters of '" + signal.proposition + "'");
    }
    auto observations = observations_of(snapshot, signal);
    std::vector<Hyperedge> out;
    for (const auto& branch : discovery.partition) {
        if (!branch.value) continue;
        if (branch.counts.positive == branch.counts.negative) continue;
        bool positive = branch.counts.positive > branch.counts.negative;
        std::string key = category_key(*branch.value);
        std::vector<const Hyperedge*> members;
        for (const auto& obs : observations) {
            if (obs.positive == positive && category_of(obs, discovery.best_attribute) == key) {
                members.push_back(&snapshot.edge(obs.id));
            }
        }
        if (members.empty()) continue;

        std::vector<double> confidences;
        TimeInterval span = members.front()->valid_time;
        for (const auto* m : members) {
            confidences.push_back(m->confidence);
            span.start = std::min(span.start, m->valid_time.start);
            span.end = std::max(span.end, m->valid_time.end);
        }
        std::vector<Participant> common;
        for (const auto& p : members.front()->participants) {
            bool everywhere = std::all_of(members.begin(), members.end(), [&](const Hyperedge* m) {
                return std::any_of(m->participants.begin(), m->participants.end(),
                                   [&](const Participant& q) { return q.ref == p.ref; });
            });
            if (everywhere) common.push_back({p.ref, p.role});
        }
        if (common.empty()) {
            std::set<std::string> seen;
            for (const auto* m : members) {
                for (const auto& p : m->participants) {
                    if (seen.insert(p.ref).second) common.push_back({p.ref, std::nullopt});
                }
            }
        }

        Hyperedge e;
        e.id = signal.proposition + "@" + discovery.best_attribute + "=" + branch.label;
        e.participants = std::move(common);
        e.attributes[discovery.best_attribute] = *branch.value;
        e.attributes["derived_from"] = std::string("context_split");
        e.valid_time = span;
        e.confidence = noisy_or(confidences);
        e.claim = ClaimTag{signal.proposition, positive ? Polarity::Supports : Polarity::Refutes};
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<Hyperedge> split_on_context(Store& store, const ContradictionSignal& signal,
                                        const DiscoveryResult& discovery) {
    auto planned = plan_context_split(store.snapshot(), signal, discovery);
    for (const auto& e : planned) store.add_edge(e);
    return planned;
}

std::string_view to_string(Decision decision) {
    switch (decision) {
        case Decision::PreferA: return "prefer_a";
        case Decision::PreferB: return "prefer_b";
        case Decision::Coexist: return "coexist";
    }
    return "?";
}

std::string_view to_string(ResolutionTier tier) {
    switch (tier) {
        case ResolutionTier::Temporal: return "temporal";
        case ResolutionTier::Confidence: return "confidence";
        case ResolutionTier::Source: return "source";
        case ResolutionTier::Specificity: return "specificity";
        case ResolutionTier::None: return "none";
    }
    return "?";
}

bool is_bookkeeping_attribute(std::string_view key) { return bookkeeping_keys().count(std::string(key)) > 0; }

std::size_t specificity(const Hyperedge& edge) {
    std::size_t n = 0;
    for (const auto& [key, value] : edge.attributes) {
        if (!is_bookkeeping_attribute(key)) ++n;
    }
    return n;
}

Verdict resolve(const Snapshot& snapshot, const EdgeId& a, const EdgeId& b) {
    const Hyperedge& ea = snapshot.edge(a);
    const Hyperedge& eb = snapshot.edge(b);
    if (!ea.claim || !eb.claim || ea.claim->proposition != eb.claim->proposition ||
        ea.claim->polarity == eb.claim->polarity) {
        throw Error(ErrorCode::NotInConflict, "'" + a + "' and '" + b + "' do not make opposing claims");
    }
    Verdict v;
    auto decide = [&](ResolutionTier tier, bool prefer_a, std::string why) {
        v.tier = tier;
        v.decision = prefer_a ? Decision::PreferA : Decision::PreferB;
        v.rationale.push_back(std::move(why));
        return v;
    };

    if (ea.valid_time.start != eb.valid_time.start) {
        bool a_newer = ea.valid_time.start > eb.valid_time.start;
        return decide(ResolutionTier::Temporal, a_newer,
                      "temporal: " + (a_newer ? a : b) + " starts later (" +
                          (a_newer ? ea : eb).valid_time.start.to_string() + ")");
    }
    v.rationale.push_back("temporal: equal start " + ea.valid_time.start.to_string());

    if (ea.confidence != eb.confidence) {
        bool a_higher = ea.confidence > eb.confidence;
        return decide(ResolutionTier::Confidence, a_higher,
                      "confidence: " + display(ea.confidence) + " vs " + display(eb.confidence));
    }
    v.rationale.push_back("confidence: equal at " + display(ea.confidence));

    auto pa = source_priority(ea);
    auto pb = source_priority(eb);
    if (pa && pb && *pa != *pb) {
        return decide(ResolutionTier::Source, *pa > *pb,
                      "source: priority " + display(*pa) + " vs " + display(*pb));
    }
    v.rationale.push_back("source: undecided");

    std::size_t sa = specificity(ea);
    std::size_t sb = specificity(eb);
    if (sa != sb) {
        return decide(ResolutionTier::Specificity, sa > sb,
                      "specificity: " + std::to_string(sa) + " vs " + std::to_string(sb) + " context attributes");
    }
    v.rationale.push_back("specificity: equal at " + std::to_string(sa));
    v.rationale.push_back("no tier decides; both claims coexist pending context discovery");
    return v;
}

AuditReport audit_chains(const Snapshot& snapshot, const EdgeId& a, const EdgeId& b, double confidence_floor) {
    AuditReport report;
    auto trace = [&](const EdgeId& id, std::vector<EdgeId>& chain, std::vector<EdgeId>& faulty) {
        chain.push_back(id);
        for (const auto& anc : causal_ancestors(snapshot, id, LinkKind::Causes)) {
            chain.push_back(anc);
            if (snapshot.edge(anc).confidence < confidence_floor) faulty.push_back(anc);
        }
    };
    trace(a, report.chain_a, report.faulty_a);
    trace(b, report.chain_b, report.faulty_b);
    if (!report.faulty_a.empty() && report.faulty_b.empty()) report.recommendation = Decision::PreferB;
    if (report.faulty_a.empty() && !report.faulty_b.empty()) report.recommendation = Decision::PreferA;
    return report;
}

AuditReport causal_audit(Store& store, const EdgeId& a, const EdgeId& b, double confidence_floor) {
    Snapshot snapshot = store.snapshot();
    AuditReport report = audit_chains(snapshot, a, b, confidence_floor);
    if (!report.recommendation) return report;
    bool blame_a = *report.recommendation == Decision::PreferB;
    const EdgeId& belief = blame_a ? a : b;
    const auto& faulty = blame_a ? report.faulty_a : report.faulty_b;
    for (const auto& source : faulty) {
        EdgeId id = "explains:" + source + "->" + belief;
        if (!snapshot.find_edge(id)) {
            const Hyperedge& bad = snapshot.edge(source);
            Hyperedge e;
            e.id = id;
            e.participants = {{source, std::string("source")}, {belief, std::string("belief")}};
            e.attributes["relation"] = std::string("caused_incorrect_belief");
            e.attributes["explanation"] = source + " caused incorrect belief " + belief;
            e.valid_time = {snapshot.edge(belief).valid_time.start, Timestamp::infinity()};
            e.confidence = 1.0 - bad.confidence;
            store.add_edge(std::move(e));
        }
        report.explanations.push_back(id);
    }
    return report;
}

}  // namespace atch
