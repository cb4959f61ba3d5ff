#include "ringbec/error.hpp"

namespace ringbec {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::BracketNotFound: return "bracket-not-found";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::ExtentTooSmall: return "extent-too-small";
    case ErrorCode::GridMismatch: return "grid-mismatch";
    case ErrorCode::RhsNotInRange: return "rhs-not-in-range";
    case ErrorCode::SingularPinning: return "singular-pinning";
    case ErrorCode::DomainViolation: return "domain-violation";
    case ErrorCode::WindowViolation: return "window-violation";
    case ErrorCode::MaxIterations: return "max-iterations";
    case ErrorCode::Stagnation: return "stagnation";
    case ErrorCode::PeakOnBoundary: return "peak-on-boundary";
    case ErrorCode::InterpolationOutOfDomain: return "interpolation-out-of-domain";
    case ErrorCode::PeakNotGaugeFixed: return "peak-not-gauge-fixed";
    case ErrorCode::CircleExitsGrid: return "circle-exits-grid";
    case ErrorCode::InsufficientPoints: return "insufficient-points";
    case ErrorCode::ResolutionViolation: return "resolution-violation";
    case ErrorCode::MissingPrerequisite: return "missing-prerequisite";
    case ErrorCode::ConfigError: return "config-error";
    case ErrorCode::IoError: return "io-error";
  }
  return "unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::MissingPrerequisite:
      return 2;
    default:
      return 1;
  }
}

}  // namespace ringbec
