#include "atch/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "atch/error.hpp"

namespace atch {

namespace {

constexpr std::int64_t kMicrosPerSecond = 1'000'000;
constexpr std::int64_t kMicrosPerDay = 86'400 * kMicrosPerSecond;

bool read_int(std::string_view text, std::size_t pos, std::size_t width, int& out) {
    if (pos + width > text.size()) return false;
    for (std::size_t i = pos; i < pos + width; ++i) {
        if (text[i] < '0' || text[i] > '9') return false;
    }
    auto res = std::from_chars(text.data() + pos, text.data() + pos + width, out);
    return res.ec == std::errc{};
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

std::string Timestamp::to_string() const {
    if (is_infinite()) return "infinity";
    using namespace std::chrono;
    std::int64_t day = floor_div(micros_, kMicrosPerDay);
    std::int64_t rem = micros_ - day * kMicrosPerDay;
    year_month_day ymd{sys_days{days{day}}};
    std::int64_t secs = rem / kMicrosPerSecond;
    std::int64_t frac = rem % kMicrosPerSecond;
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lld.%06lld+00:00", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long long>(secs / 3600), static_cast<long long>((secs / 60) % 60),
                  static_cast<long long>(secs % 60), static_cast<long long>(frac));
    return buf;
}

std::optional<Timestamp> Timestamp::parse(std::string_view text) {
    if (text == "infinity" || text == "+infinity" || text == "inf") return infinity();
    int y = 0, mo = 0, d = 0;
    if (!read_int(text, 0, 4, y) || text.size() < 10 || text[4] != '-' || !read_int(text, 5, 2, mo) ||
        text[7] != '-' || !read_int(text, 8, 2, d)) {
        return std::nullopt;
    }
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    std::int64_t micros = static_cast<std::int64_t>(sys_days{ymd}.time_since_epoch().count()) * kMicrosPerDay;

    std::size_t pos = 10;
    if (pos == text.size()) return Timestamp(micros);
    if (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ') return std::nullopt;
    ++pos;
    int hh = 0, mm = 0, ss = 0;
    if (text.size() < pos + 5 || !read_int(text, pos, 2, hh) || text[pos + 2] != ':' ||
        !read_int(text, pos + 3, 2, mm)) {
        return std::nullopt;
    }
    pos += 5;
    if (pos < text.size() && text[pos] == ':') {
        if (!read_int(text, pos + 1, 2, ss)) return std::nullopt;
        pos += 3;
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    std::int64_t frac = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        int digits = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            if (digits < 6) {
                frac = frac * 10 + (text[pos] - '0');
            }
            ++digits;
            ++pos;
        }
        if (digits == 0) return std::nullopt;
        for (int i = digits; i < 6; ++i) frac *= 10;
    }
    std::int64_t offset = 0;
    if (pos < text.size()) {
        char c = text[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            int oh = 0, om = 0;
            if (!read_int(text, pos + 1, 2, oh) || text.size() < pos + 6 || text[pos + 3] != ':' ||
                !read_int(text, pos + 4, 2, om)) {
                return std::nullopt;
            }
            offset = (static_cast<std::int64_t>(oh) * 3600 + om * 60) * kMicrosPerSecond;
            if (c == '-') offset = -offset;
            pos += 6;
        } else {
            return std::nullopt;
        }
    }
    if (pos != text.size()) return std::nullopt;
    micros += (static_cast<std::int64_t>(hh) * 3600 + mm * 60 + ss) * kMicrosPerSecond + frac - offset;
    return Timestamp(micros);
}

Timestamp Timestamp::parse_or_throw(std::string_view text) {
    auto ts = parse(text);
    if (!ts) throw Error(ErrorCode::ParseError, "malformed timestamp '" + std::string(text) + "'");
    return *ts;
}

Timestamp Timestamp::now() {
    using namespace std::chrono;
    return Timestamp(duration_cast<microseconds>(system_clock::now().time_since_epoch()).count());
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyParticipants: return "EmptyParticipants";
        case ErrorCode::UnresolvedRef: return "UnresolvedRef";
        case ErrorCode::ConfidenceOutOfRange: return "ConfidenceOutOfRange";
        case ErrorCode::MalformedInterval: return "MalformedInterval";
        case ErrorCode::ValidationFailed: return "ValidationFailed";
        case ErrorCode::CausalCycle: return "CausalCycle";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::UnknownEdge: return "UnknownEdge";
        case ErrorCode::EndBeforeStart: return "EndBeforeStart";
        case ErrorCode::SeqOutOfRange: return "SeqOutOfRange";
        case ErrorCode::EmptyPathSet: return "EmptyPathSet";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::EmptyObservations: return "EmptyObservations";
        case ErrorCode::NoAttributes: return "NoAttributes";
        case ErrorCode::ZeroGain: return "ZeroGain";
        case ErrorCode::NotInConflict: return "NotInConflict";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::CyclicPattern: return "CyclicPattern";
        case ErrorCode::UnknownConstant: return "UnknownConstant";
        case ErrorCode::FixtureMissing: return "FixtureMissing";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace atch
