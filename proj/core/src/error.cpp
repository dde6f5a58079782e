#include "ncdd/error.hpp"

namespace ncdd {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUsage: return "UsageError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDimensionError: return "DimensionError";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kPreconditionViolated: return "PreconditionViolated";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kModeUnavailable: return "ModeUnavailable";
    case ErrorCode::kAsymmetry: return "AsymmetryError";
    case ErrorCode::kSingleClass: return "SingleClassError";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kSingularCovariance: return "SingularCovariance";
    case ErrorCode::kNumerical: return "NumericalError";
  }
  return "UnknownError";
}

int Error::exit_code() const {
  switch (code_) {
    case ErrorCode::kUsage:
      return 1;
    case ErrorCode::kSingularCovariance:
    case ErrorCode::kNumerical:
      return 3;
    default:
      return 2;
  }
}

}  // namespace ncdd
