#include "atch/canonical.hpp"

#include <cmath>
#include <cstdio>

#include "atch/error.hpp"

namespace atch::canonical {

namespace {

void write(const Json& value, std::string& out) {
    switch (value.type()) {
        case Json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = value.begin(); it != value.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += Json(it.key()).dump();
                out += ':';
                write(it.value(), out);
            }
            out += '}';
            break;
        }
        case Json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& item : value) {
                if (!first) out += ',';
                first = false;
                write(item, out);
            }
            out += ']';
            break;
        }
        case Json::value_t::number_float:
            out += format_real(value.get<double>());
            break;
        default:
            out += value.dump();
            break;
    }
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const Json& field(const Json& json, const char* key) {
    if (!json.is_object() || !json.contains(key)) bad(std::string("missing field '") + key + "'");
    return json.at(key);
}

std::string string_field(const Json& json, const char* key) {
    const Json& v = field(json, key);
    if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

double real_field(const Json& json, const char* key) {
    const Json& v = field(json, key);
    if (!v.is_number()) bad(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

Timestamp time_field(const Json& json, const char* key) { return Timestamp::parse_or_throw(string_field(json, key)); }

Json encode_interval(const TimeInterval& interval) {
    return Json{{"end", interval.end.to_string()}, {"start", interval.start.to_string()}};
}

TimeInterval decode_interval(const Json& json) { return {time_field(json, "start"), time_field(json, "end")}; }

}  // namespace

std::string format_real(double value) {
    if (!std::isfinite(value)) throw Error(ErrorCode::ValidationFailed, "non-finite real in canonical output");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    std::string s = buf;
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
}

std::string dump(const Json& value) {
    std::string out;
    write(value, out);
    return out;
}

Json parse(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        bad(e.what());
    }
}

Json encode(const AttrValue& value) {
    return std::visit(
        [](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Timestamp>) {
                return Json{{"ts", v.to_string()}};
            } else {
                return Json(v);
            }
        },
        value);
}

AttrValue decode_value(const Json& json) {
    switch (json.type()) {
        case Json::value_t::string: return json.get<std::string>();
        case Json::value_t::boolean: return json.get<bool>();
        case Json::value_t::number_integer: return json.get<std::int64_t>();
        case Json::value_t::number_unsigned: return static_cast<std::int64_t>(json.get<std::uint64_t>());
        case Json::value_t::number_float: return json.get<double>();
        case Json::value_t::object:
            if (json.size() == 1 && json.contains("ts")) return time_field(json, "ts");
            break;
        default: break;
    }
    bad("unsupported attribute value " + json.dump());
}

Json encode(const Attributes& attributes) {
    Json out = Json::object();
    for (const auto& [k, v] : attributes) out[k] = encode(v);
    return out;
}

Attributes decode_attributes(const Json& json) {
    if (!json.is_object()) bad("attributes must be an object");
    Attributes out;
    for (auto it = json.begin(); it != json.end(); ++it) out.emplace(it.key(), decode_value(it.value()));
    return out;
}

Json encode(const Vertex& vertex) { return Json{{"attributes", encode(vertex.attributes)}, {"id", vertex.id}}; }

Vertex decode_vertex(const Json& json) {
    Vertex v;
    v.id = string_field(json, "id");
    if (json.contains("attributes")) v.attributes = decode_attributes(json.at("attributes"));
    return v;
}

Json encode(const Hyperedge& edge) {
    Json participants = Json::array();
    for (const auto& p : edge.participants) {
        Json item{{"ref", p.ref}};
        if (p.role) item["role"] = *p.role;
        participants.push_back(std::move(item));
    }
    Json out{{"attributes", encode(edge.attributes)},
             {"confidence", edge.confidence},
             {"id", edge.id},
             {"participants", std::move(participants)},
             {"valid_time", encode_interval(edge.valid_time)}};
    if (edge.claim) {
        out["claim"] = Json{{"polarity", std::string(to_string(edge.claim->polarity))},
                            {"proposition", edge.claim->proposition}};
    }
    return out;
}

Hyperedge decode_edge(const Json& json) {
    Hyperedge e;
    e.id = string_field(json, "id");
    const Json& parts = field(json, "participants");
    if (!parts.is_array()) bad("participants must be an array");
    for (const auto& p : parts) {
        Participant part{string_field(p, "ref"), std::nullopt};
        if (p.contains("role")) part.role = string_field(p, "role");
        e.participants.push_back(std::move(part));
    }
    if (json.contains("attributes")) e.attributes = decode_attributes(json.at("attributes"));
    e.valid_time = decode_interval(field(json, "valid_time"));
    e.confidence = real_field(json, "confidence");
    if (json.contains("claim")) {
        const Json& c = json.at("claim");
        std::string pol = string_field(c, "polarity");
        if (pol != "supports" && pol != "refutes") bad("unknown polarity '" + pol + "'");
        e.claim = ClaimTag{string_field(c, "proposition"), pol == "supports" ? Polarity::Supports : Polarity::Refutes};
    }
    return e;
}

Json encode(const CausalLink& link) {
    Json out{{"cause", link.cause},
             {"effect", link.effect},
             {"kind", std::string(to_string(link.kind))},
             {"link_confidence", link.link_confidence},
             {"mechanism", link.mechanism}};
    if (link.conditional_confidence) out["conditional_confidence"] = *link.conditional_confidence;
    return out;
}

CausalLink decode_link(const Json& json) {
    CausalLink l;
    l.cause = string_field(json, "cause");
    l.effect = string_field(json, "effect");
    l.mechanism = json.contains("mechanism") ? string_field(json, "mechanism") : std::string();
    l.link_confidence = real_field(json, "link_confidence");
    if (json.contains("conditional_confidence")) l.conditional_confidence = real_field(json, "conditional_confidence");
    std::string kind = json.contains("kind") ? string_field(json, "kind") : std::string("causes");
    if (kind == "causes") {
        l.kind = LinkKind::Causes;
    } else if (kind == "inhibits") {
        l.kind = LinkKind::Inhibits;
    } else {
        bad("unknown link kind '" + kind + "'");
    }
    return l;
}

Json encode(const ConfidenceAssessment& a) {
    return Json{{"methodology", a.methodology}, {"source", a.source}, {"target", a.target}, {"value", a.value}};
}

ConfidenceAssessment decode_assessment(const Json& json) {
    ConfidenceAssessment a;
    a.target = string_field(json, "target");
    a.source = json.contains("source") ? string_field(json, "source") : std::string();
    a.methodology = json.contains("methodology") ? string_field(json, "methodology") : std::string();
    a.value = real_field(json, "value");
    return a;
}

Json encode(const AttrPredicate& p) {
    return Json{{"key", p.key}, {"literal", encode(p.literal)}, {"op", std::string(to_string(p.op))}};
}

AttrPredicate decode_predicate(const Json& json) {
    AttrPredicate p;
    p.key = string_field(json, "key");
    auto op = parse_compare_op(string_field(json, "op"));
    if (!op) bad("unknown comparison operator");
    p.op = *op;
    p.literal = decode_value(field(json, "literal"));
    return p;
}

Json encode(const ContextRule& rule) {
    Json conditions = Json::array();
    for (const auto& c : rule.conditions) {
        Json item = encode(c.predicate);
        item["subject"] = std::string(to_string(c.subject));
        conditions.push_back(std::move(item));
    }
    Json out{{"conditions", std::move(conditions)}, {"id", rule.id}, {"inhibition_strength", rule.inhibition_strength}};
    if (rule.mechanism) out["mechanism"] = *rule.mechanism;
    return out;
}

ContextRule decode_rule(const Json& json) {
    ContextRule r;
    r.id = string_field(json, "id");
    r.inhibition_strength = real_field(json, "inhibition_strength");
    if (json.contains("mechanism")) r.mechanism = string_field(json, "mechanism");
    if (json.contains("conditions")) {
        for (const auto& c : json.at("conditions")) {
            ContextCondition cond;
            std::string subject = string_field(c, "subject");
            if (subject == "cause") {
                cond.subject = RuleSubject::Cause;
            } else if (subject == "effect") {
                cond.subject = RuleSubject::Effect;
            } else {
                bad("unknown rule subject '" + subject + "'");
            }
            cond.predicate = decode_predicate(c);
            r.conditions.push_back(std::move(cond));
        }
    }
    return r;
}

}  // namespace atch::canonical
