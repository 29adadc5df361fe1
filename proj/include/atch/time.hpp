#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace atch {

// Microseconds since the Unix epoch, UTC. The maximum value is reserved as
// the open-ended "+infinity" sentinel used for relationships that hold until
// explicitly terminated.
class Timestamp {
public:
    constexpr Timestamp() = default;
    constexpr explicit Timestamp(std::int64_t micros) : micros_(micros) {}

    static constexpr Timestamp infinity() { return Timestamp(std::numeric_limits<std::int64_t>::max()); }
    static constexpr Timestamp min() { return Timestamp(std::numeric_limits<std::int64_t>::min()); }

    constexpr std::int64_t micros() const { return micros_; }
    constexpr bool is_infinite() const { return micros_ == std::numeric_limits<std::int64_t>::max(); }

    constexpr auto operator<=>(const Timestamp&) const = default;

    // RFC 3339 with an explicit offset and six fractional digits, or
    // "infinity" for the sentinel.
    std::string to_string() const;

    // Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.ffffff]]" with an optional
    // "Z" or "+HH:MM"/"-HH:MM" suffix (a space may replace the 'T'), and
    // "infinity". Returns nullopt on malformed input.
    static std::optional<Timestamp> parse(std::string_view text);

    // Throws Error(ParseError) on malformed input.
    static Timestamp parse_or_throw(std::string_view text);

    static Timestamp now();

private:
    std::int64_t micros_ = 0;
};

// Closed interval [start, end]; end may be Timestamp::infinity().
struct TimeInterval {
    Timestamp start;
    Timestamp end = Timestamp::infinity();

    bool well_formed() const { return start <= end; }
    bool contains(Timestamp t) const { return start <= t && t <= end; }
    bool intersects(const TimeInterval& other) const { return start <= other.end && other.start <= end; }

    bool operator==(const TimeInterval&) const = default;
};

}  // namespace atch
