#pragma once

#include <stdexcept>
#include <string>

namespace drpt {

// Error codes shared between the C++ core and the C API surface.
enum class ErrorCode : int {
    Ok = 0,
    InvalidArgument,
    ParseError,
    IoError,
    NonPositiveRatio,
    DomainMismatch,
    NoBracket,
    NoConvergence,
    TooLarge,
    TooFewPoints,
    LambdaMismatch,
    EmptyDictionary,
    DegenerateSample,
    InvalidTable,
    InfeasibleTotals,
    OutOfRange,
    ZeroCell,
    EmptyCandidates,
    SeparableData,
    EstimatorFailure,
    Internal,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) fail(code, message);
}

} // namespace drpt
