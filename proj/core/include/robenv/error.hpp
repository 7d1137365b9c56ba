#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robenv {

enum class ErrorCode {
  ZeroDenominator,
  PreconditionViolated,
  NoSolution,
  NoFeasibleR,
  SupportCapExceeded,
  AsymmetricY,
  PrecisionInsufficient,
  LevelOutOfRange,
  ShapeMismatch,
  SpaceTooLarge,
  MalformedInput,
  CoordinateOutOfRange,
  NotInterestingSubset,
  AnalyticUnavailable,
  BallTooLarge,
  EmptyClass,
  DimensionTooLarge,
  EnumerationCapExceeded,
  NoOtherClass,
  BitDepthTooLarge,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace robenv
