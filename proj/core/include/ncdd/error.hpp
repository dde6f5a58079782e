#pragma once

#include <stdexcept>
#include <string>

namespace ncdd {

enum class ErrorCode {
  kUsage,
  kDimensionMismatch,
  kDimensionError,
  kNonFiniteValue,
  kPreconditionViolated,
  kConfigError,
  kModeUnavailable,
  kAsymmetry,
  kSingleClass,
  kParse,
  kVersionMismatch,
  kSingularCovariance,
  kNumerical,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

  // Process exit code contract: 1 usage, 2 data error, 3 numerical failure.
  int exit_code() const;

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace ncdd
