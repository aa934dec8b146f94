#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spenra {

enum class ErrorCode {
    InvalidArgument,
    OrderTooLarge,
    TooShort,
    EmptyAfterLeaveOut,
    DegenerateWeights,
    InsufficientData,
    OptimizerFailure,
    QuadratureNonConvergence,
    MissingTimestamps,
    NoMatches,
    IsolatedVector,
    AmbiguousState,
    NonFiniteState,
    NoEvents,
    ParseError,
    IoError,
};

[[nodiscard]] std::string_view error_code_name(ErrorCode code) noexcept;

/// Library-wide exception. Every failure raised by spenra carries one of the
/// codes above so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace spenra
