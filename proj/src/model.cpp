#include "atch/model.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace atch {

namespace {

std::optional<double> as_number(const AttrValue& v) {
    if (auto i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    if (auto d = std::get_if<double>(&v)) return *d;
    return std::nullopt;
}

template <typename T>
bool apply(const T& a, CompareOp op, const T& b) {
    switch (op) {
        case CompareOp::Eq: return a == b;
        case CompareOp::Ne: return a != b;
        case CompareOp::Lt: return a < b;
        case CompareOp::Le: return a <= b;
        case CompareOp::Gt: return a > b;
        case CompareOp::Ge: return a >= b;
    }
    return false;
}

std::string shortest_real(double v) {
    char buf[32];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace

std::string display(const AttrValue& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                return shortest_real(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else {
                return v.to_string();
            }
        },
        value);
}

std::string category_key(const AttrValue& value) {
    static constexpr const char* kTags[] = {"s:", "i:", "r:", "b:", "t:"};
    return kTags[value.index()] + display(value);
}

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "!=";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
    }
    return "?";
}

std::optional<CompareOp> parse_compare_op(std::string_view text) {
    if (text == "=" || text == "==") return CompareOp::Eq;
    if (text == "!=" || text == "≠") return CompareOp::Ne;
    if (text == "<") return CompareOp::Lt;
    if (text == "<=" || text == "≤") return CompareOp::Le;
    if (text == ">") return CompareOp::Gt;
    if (text == ">=" || text == "≥") return CompareOp::Ge;
    return std::nullopt;
}

bool compare_values(const AttrValue& lhs, CompareOp op, const AttrValue& rhs) {
    auto ln = as_number(lhs);
    auto rn = as_number(rhs);
    if (ln && rn) {
        if (lhs.index() == rhs.index() && std::holds_alternative<std::int64_t>(lhs)) {
            return apply(std::get<std::int64_t>(lhs), op, std::get<std::int64_t>(rhs));
        }
        return apply(*ln, op, *rn);
    }
    if (lhs.index() != rhs.index()) return op == CompareOp::Ne;
    return std::visit(
        [&](const auto& a) -> bool {
            using T = std::decay_t<decltype(a)>;
            return apply(a, op, std::get<T>(rhs));
        },
        lhs);
}

bool AttrPredicate::matches(const Attributes& attributes) const {
    auto it = attributes.find(key);
    if (it == attributes.end()) return false;
    return compare_values(it->second, op, literal);
}

std::string_view to_string(Polarity polarity) {
    return polarity == Polarity::Supports ? "supports" : "refutes";
}

Polarity opposite(Polarity polarity) {
    return polarity == Polarity::Supports ? Polarity::Refutes : Polarity::Supports;
}

std::string_view to_string(LinkKind kind) { return kind == LinkKind::Causes ? "causes" : "inhibits"; }

std::string_view to_string(RuleSubject subject) { return subject == RuleSubject::Cause ? "cause" : "effect"; }

bool ContextRule::matches(const Hyperedge& cause, const Hyperedge& effect, std::string_view link_mechanism) const {
    if (mechanism && *mechanism != link_mechanism) return false;
    for (const auto& cond : conditions) {
        const Hyperedge& subject = cond.subject == RuleSubject::Cause ? cause : effect;
        if (!cond.predicate.matches(subject.attributes)) return false;
    }
    return true;
}

bool confidence_in_range(double value) { return value >= 0.0 && value <= 1.0; }

std::vector<Violation> validate(const Hyperedge& edge, const RefResolver& resolver) {
    std::vector<Violation> out;
    if (edge.participants.empty()) {
        out.push_back({ErrorCode::EmptyParticipants, "hyperedge '" + edge.id + "' has no participants"});
    }
    if (!confidence_in_range(edge.confidence)) {
        std::ostringstream msg;
        msg << "confidence " << edge.confidence << " outside [0, 1]";
        out.push_back({ErrorCode::ConfidenceOutOfRange, msg.str()});
    }
    if (!edge.valid_time.well_formed()) {
        out.push_back({ErrorCode::MalformedInterval, "valid_time start " + edge.valid_time.start.to_string() +
                                                         " after end " + edge.valid_time.end.to_string()});
    }
    if (edge.tx_time && !edge.tx_time->well_formed()) {
        out.push_back({ErrorCode::MalformedInterval, "tx_time start after end"});
    }
    if (edge.claim && edge.claim->proposition.empty()) {
        out.push_back({ErrorCode::ValidationFailed, "claim proposition is empty"});
    }
    for (const auto& p : edge.participants) {
        if (p.ref.empty()) {
            out.push_back({ErrorCode::UnresolvedRef, "empty participant reference"});
        } else if (resolver && (p.ref == edge.id || !resolver(p.ref))) {
            out.push_back({ErrorCode::UnresolvedRef, "participant '" + p.ref + "' does not resolve"});
        }
    }
    return out;
}

std::vector<Violation> validate(const CausalLink& link) {
    std::vector<Violation> out;
    if (link.cause.empty() || link.effect.empty()) {
        out.push_back({ErrorCode::ValidationFailed, "causal link endpoints must be non-empty"});
    }
    if (link.cause == link.effect) {
        out.push_back({ErrorCode::CausalCycle, "causal link from '" + link.cause + "' to itself"});
    }
    if (!confidence_in_range(link.link_confidence)) {
        out.push_back({ErrorCode::ConfidenceOutOfRange, "link confidence outside [0, 1]"});
    }
    if (link.conditional_confidence && !confidence_in_range(*link.conditional_confidence)) {
        out.push_back({ErrorCode::ConfidenceOutOfRange, "conditional confidence outside [0, 1]"});
    }
    return out;
}

std::vector<Violation> validate(const ContextRule& rule) {
    std::vector<Violation> out;
    if (rule.id.empty()) out.push_back({ErrorCode::ValidationFailed, "context rule id is empty"});
    if (!confidence_in_range(rule.inhibition_strength)) {
        out.push_back({ErrorCode::ConfidenceOutOfRange, "inhibition strength outside [0, 1]"});
    }
    return out;
}

Hyperedge new_hyperedge(NewEdgeArgs args, const RefResolver& resolver) {
    Hyperedge edge;
    edge.id = args.id.empty() ? generate_uuid() : std::move(args.id);
    edge.participants = std::move(args.participants);
    edge.attributes = std::move(args.attributes);
    edge.valid_time = args.valid_time;
    edge.confidence = args.confidence;
    edge.claim = std::move(args.claim);
    auto violations = validate(edge, resolver);
    if (!violations.empty()) {
        std::string message;
        for (const auto& v : violations) {
            if (!message.empty()) message += "; ";
            message += v.detail;
        }
        throw Error(violations.front().code, message);
    }
    return edge;
}

std::string generate_uuid() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    std::uint64_t hi = rng();
    std::uint64_t lo = rng();
    hi = (hi & 0xFFFFFFFFFFFF0FFFULL) | 0x0000000000004000ULL;
    lo = (lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;
    char buf[37];
    std::snprintf(buf, sizeof(buf), "%08x-%04x-%04x-%04x-%012llx", static_cast<unsigned>(hi >> 32),
                  static_cast<unsigned>((hi >> 16) & 0xFFFF), static_cast<unsigned>(hi & 0xFFFF),
                  static_cast<unsigned>(lo >> 48), static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
    return buf;
}

std::vector<Participant> participants_of(std::initializer_list<std::string_view> refs) {
    std::vector<Participant> out;
    out.reserve(refs.size());
    for (auto r : refs) out.push_back({std::string(r), std::nullopt});
    return out;
}

}  // namespace atch
