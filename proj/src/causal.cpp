#include "atch/causal.hpp"

#include <algorithm>
#include <cmath>

#include "atch/temporal.hpp"

namespace atch {

double propagate_confidence(const ChainSpec& spec) {
    double kappa = spec.first_confidence;
    for (const auto& link : spec.links) kappa *= link.link_confidence * link.context_modifier;
    return kappa;
}

double context_modifier(const Hyperedge& cause, const Hyperedge& effect, std::string_view mechanism,
                        std::span<const ContextRule> rules) {
    double modifier = 1.0;
    for (const auto& rule : rules) {
        if (rule.matches(cause, effect, mechanism)) modifier *= (1.0 - rule.inhibition_strength);
    }
    return modifier;
}

CausalChain build_chain(const Snapshot& snapshot, const std::vector<EdgeId>& path) {
    CausalChain chain;
    if (path.empty()) return chain;
    for (const auto& id : path) chain.nodes.push_back({id, snapshot.edge(id).confidence});
    ChainSpec spec{chain.nodes.front().node_confidence, {}};
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const CausalLink* found = nullptr;
        for (const CausalLink* l : snapshot.links_from(path[i])) {
            if (l->effect == path[i + 1] && l->kind == LinkKind::Causes) {
                found = l;
                break;
            }
        }
        if (!found) throw Error(ErrorCode::ValidationFailed, "no causal link " + path[i] + " -> " + path[i + 1]);
        ChainLink link{found->mechanism, found->link_confidence,
                       context_modifier(snapshot.edge(path[i]), snapshot.edge(path[i + 1]), found->mechanism,
                                        snapshot.context_rules())};
        chain.links.push_back(link);
        spec.links.push_back(link);
    }
    chain.chain_confidence = propagate_confidence(spec);
    return chain;
}

double noisy_or(std::span<const double> confidences) {
    double miss = 1.0;
    for (double k : confidences) miss *= (1.0 - k);
    return 1.0 - miss;
}

double combine_paths(std::span<const double> confidences, CombineMode mode) {
    if (confidences.empty()) throw Error(ErrorCode::EmptyPathSet, "no path confidences to combine");
    if (mode == CombineMode::Max) return *std::max_element(confidences.begin(), confidences.end());
    return noisy_or(confidences);
}

SharedAncestry detect_shared_ancestors(const Snapshot& snapshot, const std::vector<std::vector<EdgeId>>& paths) {
    std::vector<std::set<EdgeId>> upstream;
    upstream.reserve(paths.size());
    for (const auto& path : paths) {
        std::set<EdgeId> s;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            s.insert(path[i]);
            s.merge(causal_ancestors(snapshot, path[i], LinkKind::Causes));
        }
        if (!path.empty()) snapshot.edge(path.back());
        upstream.push_back(std::move(s));
    }
    SharedAncestry result;
    for (std::size_t i = 0; i < upstream.size(); ++i) {
        for (std::size_t j = i + 1; j < upstream.size(); ++j) {
            std::set_intersection(upstream[i].begin(), upstream[i].end(), upstream[j].begin(), upstream[j].end(),
                                  std::inserter(result.common, result.common.end()));
        }
    }
    result.shared = !result.common.empty();
    return result;
}

int effective_depth(double kappa_min, double theta) {
    if (!(kappa_min > 0.0 && kappa_min < 1.0)) {
        throw Error(ErrorCode::DomainError, "minimum link confidence must lie strictly between 0 and 1");
    }
    if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorCode::DomainError, "threshold must lie in (0, 1]");
    // The ratio can land a rounding error away from an exact integer
    // (0.25 against 0.5); settle on the least d with κ_min^d <= θ.
    int d = static_cast<int>(std::ceil(std::log(theta) / std::log(kappa_min)));
    if (d < 0) d = 0;
    while (d > 0 && std::pow(kappa_min, d - 1) <= theta) --d;
    while (std::pow(kappa_min, d) > theta) ++d;
    return d;
}

std::set<EdgeId> active_defaults(const Snapshot& snapshot, Timestamp t) {
    std::set<EdgeId> valid = at_time(snapshot, t).edges;
    std::set<EdgeId> out;
    for (const auto& id : valid) {
        bool inhibited = false;
        for (const CausalLink* l : snapshot.links_to(id)) {
            if (l->kind == LinkKind::Inhibits && valid.count(l->cause)) {
                inhibited = true;
                break;
            }
        }
        if (!inhibited) out.insert(id);
    }
    return out;
}

namespace {

struct Tracer {
    const Snapshot& snapshot;
    const TraceOptions& options;

    void expand(TraceNode& node, double link_product, double root_confidence) {
        if (node.depth >= options.depth) return;
        bool backwards = options.direction == TraceDirection::Causes;
        auto links = backwards ? snapshot.links_to(node.edge) : snapshot.links_from(node.edge);
        for (const CausalLink* l : links) {
            if (l->kind != LinkKind::Causes) continue;
            const EdgeId& next_id = backwards ? l->cause : l->effect;
            const Hyperedge& next = snapshot.edge(next_id);
            if (options.as_of && !next.valid_time.contains(*options.as_of)) continue;
            const Hyperedge& here = snapshot.edge(node.edge);
            const Hyperedge& cause = backwards ? next : here;
            const Hyperedge& effect = backwards ? here : next;
            ChainLink link{l->mechanism, l->link_confidence,
                           context_modifier(cause, effect, l->mechanism, snapshot.context_rules())};
            double product = link_product * link.effective();
            double chain = (backwards ? next.confidence : root_confidence) * product;
            if (options.threshold && chain < *options.threshold) continue;
            TraceNode child;
            child.edge = next_id;
            child.node_confidence = next.confidence;
            child.depth = node.depth + 1;
            child.link = link;
            child.chain_confidence = chain;
            expand(child, product, root_confidence);
            node.children.push_back(std::move(child));
        }
    }
};

void collect(const TraceNode& node, std::vector<const TraceNode*>& path, std::vector<std::vector<const TraceNode*>>& out) {
    path.push_back(&node);
    if (node.children.empty()) {
        out.push_back(path);
    } else {
        for (const auto& c : node.children) collect(c, path, out);
    }
    path.pop_back();
}

}  // namespace

TraceResult trace_causal_chain(const Snapshot& snapshot, const EdgeId& target, const TraceOptions& options) {
    if (options.depth < 0) throw Error(ErrorCode::DomainError, "trace depth must be non-negative");
    const Hyperedge& root = snapshot.edge(target);
    TraceResult result;
    result.root = target;
    result.direction = options.direction;
    result.tree.edge = target;
    result.tree.node_confidence = root.confidence;
    result.tree.chain_confidence = root.confidence;
    Tracer tracer{snapshot, options};
    tracer.expand(result.tree, 1.0, root.confidence);
    return result;
}

std::vector<CausalChain> TraceResult::chains() const {
    std::vector<std::vector<const TraceNode*>> paths;
    std::vector<const TraceNode*> scratch;
    collect(tree, scratch, paths);
    std::vector<CausalChain> out;
    for (auto& path : paths) {
        CausalChain chain;
        chain.chain_confidence = path.back()->chain_confidence;
        if (direction == TraceDirection::Causes) {
            // Tree runs effect → cause; each node's link joins it to the node below.
            for (auto it = path.rbegin(); it != path.rend(); ++it) {
                chain.nodes.push_back({(*it)->edge, (*it)->node_confidence});
                if ((*it)->link) chain.links.push_back(*(*it)->link);
            }
        } else {
            for (const TraceNode* n : path) {
                chain.nodes.push_back({n->edge, n->node_confidence});
                if (n->link) chain.links.push_back(*n->link);
            }
        }
        out.push_back(std::move(chain));
    }
    return out;
}

std::set<EdgeId> TraceResult::nodes() const {
    std::set<EdgeId> out;
    std::vector<const TraceNode*> stack{&tree};
    while (!stack.empty()) {
        const TraceNode* n = stack.back();
        stack.pop_back();
        out.insert(n->edge);
        for (const auto& c : n->children) stack.push_back(&c);
    }
    return out;
}

int TraceResult::max_links() const {
    int best = 0;
    std::vector<const TraceNode*> stack{&tree};
    while (!stack.empty()) {
        const TraceNode* n = stack.back();
        stack.pop_back();
        best = std::max(best, n->depth);
        for (const auto& c : n->children) stack.push_back(&c);
    }
    return best;
}

}  // namespace atch
