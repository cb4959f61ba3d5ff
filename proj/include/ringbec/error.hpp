#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ringbec {

enum class ErrorCode {
  BracketNotFound,
  NonConvergence,
  ExtentTooSmall,
  GridMismatch,
  RhsNotInRange,
  SingularPinning,
  DomainViolation,
  WindowViolation,
  MaxIterations,
  Stagnation,
  PeakOnBoundary,
  InterpolationOutOfDomain,
  PeakNotGaugeFixed,
  CircleExitsGrid,
  InsufficientPoints,
  ResolutionViolation,
  MissingPrerequisite,
  ConfigError,
  IoError,
};

std::string_view error_code_name(ErrorCode code);

// Numeric failures map to exit code 1, usage and config problems to 2.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ringbec
