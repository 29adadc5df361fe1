#pragma once

#include <string>

#include <json.hpp>

#include "atch/model.hpp"

namespace atch::canonical {

using Json = nlohmann::json;

// Compact, key-sorted rendering. Reals are printed with 17 significant
// digits and always carry a '.' or exponent so they re-parse as reals.
std::string dump(const Json& value);

// Throws Error(ParseError) on malformed text.
Json parse(const std::string& text);

std::string format_real(double value);

Json encode(const AttrValue& value);
AttrValue decode_value(const Json& json);

Json encode(const Attributes& attributes);
Attributes decode_attributes(const Json& json);

Json encode(const Vertex& vertex);
Vertex decode_vertex(const Json& json);

// tx_time is not part of the payload; it lives on the log record.
Json encode(const Hyperedge& edge);
Hyperedge decode_edge(const Json& json);

Json encode(const CausalLink& link);
CausalLink decode_link(const Json& json);

Json encode(const ConfidenceAssessment& assessment);
ConfidenceAssessment decode_assessment(const Json& json);

Json encode(const ContextRule& rule);
ContextRule decode_rule(const Json& json);

Json encode(const AttrPredicate& predicate);
AttrPredicate decode_predicate(const Json& json);

}  // namespace atch::canonical
