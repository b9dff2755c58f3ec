#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace trackctl {

enum class ErrorCode {
  kInvalidArgument,
  kNonSquare,
  kDimensionMismatch,
  kSingular,
  kInsufficientRegularity,
  kCompatibilityViolation,
  kNotControllable,
  kAllZeroOutput,
  kTooLarge,
  kZeroCoefficient,
  kNoConvergence,
  kIoError,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; the code carries the failure class
// and what() carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the problem parser; `path` names the offending JSON field
// (e.g. "A[1][0]" or "target.omega").
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& what)
      : Error(ErrorCode::kInvalidArgument, path + ": " + what),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace trackctl
