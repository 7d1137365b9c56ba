#include "robenv/error.hpp"

namespace robenv {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::NoFeasibleR: return "NoFeasibleR";
    case ErrorCode::SupportCapExceeded: return "SupportCapExceeded";
    case ErrorCode::AsymmetricY: return "AsymmetricY";
    case ErrorCode::PrecisionInsufficient: return "PrecisionInsufficient";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SpaceTooLarge: return "SpaceTooLarge";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::CoordinateOutOfRange: return "CoordinateOutOfRange";
    case ErrorCode::NotInterestingSubset: return "NotInterestingSubset";
    case ErrorCode::AnalyticUnavailable: return "AnalyticUnavailable";
    case ErrorCode::BallTooLarge: return "BallTooLarge";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::EnumerationCapExceeded: return "EnumerationCapExceeded";
    case ErrorCode::NoOtherClass: return "NoOtherClass";
    case ErrorCode::BitDepthTooLarge: return "BitDepthTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace robenv
