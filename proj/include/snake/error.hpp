// Error type shared by every module.
#pragma once

#include <stdexcept>
#include <string>

namespace snake {

enum class ErrorCode {
    EnumerationTooLarge,
    Precondition,
    UnsupportedParameter,
    SingularSector,
    RegimeViolation,
    ZeroPartition,
    VanishingDenominator,
    PoleOnContour,
    QuadratureFailure,
    Intractable,
    NegativeProbability,
    Internal,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) throw Error(code, what);
}

} // namespace snake
