#include "weinstein/error.hpp"

namespace weinstein {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidDimension: return "invalid-dimension";
    case ErrorCode::InvalidSize: return "invalid-size";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::GridMismatch: return "grid-mismatch";
    case ErrorCode::ZeroFunction: return "zero-function";
    case ErrorCode::ZeroGradient: return "zero-gradient";
    case ErrorCode::NumericFailure: return "numeric-failure";
    case ErrorCode::QuadratureNonConvergence: return "quadrature-non-convergence";
    case ErrorCode::SpectralFailure: return "spectral-failure";
    case ErrorCode::UnsupportedExponent: return "unsupported-exponent";
    case ErrorCode::BracketNotFound: return "bracket-not-found";
    case ErrorCode::NonMonotoneProfile: return "non-monotone-profile";
    case ErrorCode::NonAscent: return "non-ascent";
    case ErrorCode::InvalidConfig: return "invalid-config";
    case ErrorCode::Io: return "io-failure";
    }
    return "unknown";
}

} // namespace weinstein
