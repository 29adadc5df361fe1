#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "atch/error.hpp"
#include "atch/time.hpp"

namespace atch {

// Vertices and hyperedges share one identifier namespace: a hyperedge may
// participate in another hyperedge exactly like an entity does.
using EntityId = std::string;
using EdgeId = std::string;

using AttrValue = std::variant<std::string, std::int64_t, double, bool, Timestamp>;
using Attributes = std::map<std::string, AttrValue>;

// Human-readable rendering (strings unquoted, reals shortest round-trip).
std::string display(const AttrValue& value);
// Type-tagged key used to group equal values (6.1 and "6.1" stay distinct).
std::string category_key(const AttrValue& value);

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(CompareOp op);
std::optional<CompareOp> parse_compare_op(std::string_view text);

// Integers and reals compare numerically; any other mix of types is
// incomparable, which satisfies only Ne.
bool compare_values(const AttrValue& lhs, CompareOp op, const AttrValue& rhs);

struct AttrPredicate {
    std::string key;
    CompareOp op = CompareOp::Eq;
    AttrValue literal;

    // A missing attribute never satisfies the predicate.
    bool matches(const Attributes& attributes) const;

    bool operator==(const AttrPredicate&) const = default;
};

struct Participant {
    std::string ref;
    std::optional<std::string> role;

    bool operator==(const Participant&) const = default;
};

enum class Polarity { Supports, Refutes };

std::string_view to_string(Polarity polarity);
Polarity opposite(Polarity polarity);

struct ClaimTag {
    std::string proposition;
    Polarity polarity = Polarity::Supports;

    bool operator==(const ClaimTag&) const = default;
};

struct Vertex {
    EntityId id;
    Attributes attributes;

    bool operator==(const Vertex&) const = default;
};

struct Hyperedge {
    EdgeId id;
    std::vector<Participant> participants;
    Attributes attributes;
    TimeInterval valid_time;
    // Assigned by the store on append; unset on freshly built edges.
    std::optional<TimeInterval> tx_time;
    double confidence = 1.0;
    std::optional<ClaimTag> claim;

    std::size_t arity() const { return participants.size(); }

    bool operator==(const Hyperedge&) const = default;
};

enum class LinkKind { Causes, Inhibits };

std::string_view to_string(LinkKind kind);

struct CausalLink {
    EdgeId cause;
    EdgeId effect;
    std::string mechanism;
    double link_confidence = 1.0;
    // Stored for completeness; chain propagation does not consume it.
    std::optional<double> conditional_confidence;
    LinkKind kind = LinkKind::Causes;

    bool operator==(const CausalLink&) const = default;
};

struct ConfidenceAssessment {
    EdgeId target;
    std::string source;
    std::string methodology;
    double value = 0.0;
    Timestamp tx_time;

    bool operator==(const ConfidenceAssessment&) const = default;
};

enum class RuleSubject { Cause, Effect };

std::string_view to_string(RuleSubject subject);

struct ContextCondition {
    RuleSubject subject = RuleSubject::Cause;
    AttrPredicate predicate;

    bool operator==(const ContextCondition&) const = default;
};

// Attenuates a causal link by (1 - inhibition_strength) when every
// condition holds on the link's endpoints (and the mechanism matches, if
// one is given).
struct ContextRule {
    std::string id;
    std::vector<ContextCondition> conditions;
    std::optional<std::string> mechanism;
    double inhibition_strength = 0.0;

    bool matches(const Hyperedge& cause, const Hyperedge& effect, std::string_view link_mechanism) const;

    bool operator==(const ContextRule&) const = default;
};

struct Violation {
    ErrorCode code;
    std::string detail;
};

// Returns true when the identifier names an existing vertex or hyperedge.
using RefResolver = std::function<bool(std::string_view)>;

bool confidence_in_range(double value);

// Reports every violated invariant. Reference resolution is only checked
// when a resolver is supplied.
std::vector<Violation> validate(const Hyperedge& edge, const RefResolver& resolver = {});
std::vector<Violation> validate(const CausalLink& link);
std::vector<Violation> validate(const ContextRule& rule);

struct NewEdgeArgs {
    std::vector<Participant> participants;
    Attributes attributes;
    TimeInterval valid_time;
    double confidence = 1.0;
    std::optional<ClaimTag> claim;
    // Generated when empty.
    EdgeId id;
};

// Builds a validated edge; throws Error carrying the first violation's code.
Hyperedge new_hyperedge(NewEdgeArgs args, const RefResolver& resolver = {});

// Random RFC 4122 version-4 identifier.
std::string generate_uuid();

std::vector<Participant> participants_of(std::initializer_list<std::string_view> refs);

}  // namespace atch
