#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace atch {

enum class ErrorCode {
    EmptyParticipants,
    UnresolvedRef,
    ConfidenceOutOfRange,
    MalformedInterval,
    ValidationFailed,
    CausalCycle,
    DuplicateId,
    UnknownEdge,
    EndBeforeStart,
    SeqOutOfRange,
    EmptyPathSet,
    DomainError,
    EmptyObservations,
    NoAttributes,
    ZeroGain,
    NotInConflict,
    SyntaxError,
    CyclicPattern,
    UnknownConstant,
    FixtureMissing,
    TooLarge,
    ParseError,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the engine carries one of the codes above so
// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Parse failures that can point at a location in the input.
class PositionedError : public Error {
public:
    PositionedError(ErrorCode code, const std::string& message, int line, int column)
        : Error(code, message + " (line " + std::to_string(line) +
                          (column > 0 ? ", column " + std::to_string(column) : std::string()) + ")"),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace atch
