#include "trackctl/error.hpp"

namespace trackctl {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonSquare: return "NonSquare";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kInsufficientRegularity: return "InsufficientRegularity";
    case ErrorCode::kCompatibilityViolation: return "CompatibilityViolation";
    case ErrorCode::kNotControllable: return "NotControllable";
    case ErrorCode::kAllZeroOutput: return "AllZeroOutput";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kZeroCoefficient: return "ZeroCoefficient";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace trackctl
