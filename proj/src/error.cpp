#include "snake/error.hpp"

namespace snake {

const char* error_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::EnumerationTooLarge: return "enumeration-too-large";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::UnsupportedParameter: return "unsupported-parameter";
    case ErrorCode::SingularSector: return "singular-sector";
    case ErrorCode::RegimeViolation: return "regime-violation";
    case ErrorCode::ZeroPartition: return "zero-partition";
    case ErrorCode::VanishingDenominator: return "vanishing-denominator";
    case ErrorCode::PoleOnContour: return "pole-on-contour";
    case ErrorCode::QuadratureFailure: return "quadrature-failure";
    case ErrorCode::Intractable: return "intractable";
    case ErrorCode::NegativeProbability: return "negative-probability";
    case ErrorCode::Internal: return "internal";
    }
    return "unknown";
}

} // namespace snake
