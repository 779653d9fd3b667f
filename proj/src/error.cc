#include "cascade_stab/error.h"

namespace cascade_stab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCascadeViolation: return "CascadeViolation";
    case ErrorCode::kControllabilityViolation: return "ControllabilityViolation";
    case ErrorCode::kNonPositiveDiffusion: return "NonPositiveDiffusion";
    case ErrorCode::kDegenerateBoundary: return "DegenerateBoundary";
    case ErrorCode::kUnsupportedBoundary: return "UnsupportedBoundary";
    case ErrorCode::kBadShape: return "BadShape";
    case ErrorCode::kBadInput: return "BadInput";
    case ErrorCode::kHypothesisHViolated: return "HypothesisHViolated";
    case ErrorCode::kRootBracketingFailure: return "RootBracketingFailure";
    case ErrorCode::kQuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorCode::kIndexOutOfSupport: return "IndexOutOfSupport";
    case ErrorCode::kResidualNonzero: return "ResidualNonzero";
    case ErrorCode::kPolePlacementSingular: return "PolePlacementSingular";
    case ErrorCode::kRiccatiFailure: return "RiccatiFailure";
    case ErrorCode::kCertificateViolation: return "CertificateViolation";
    case ErrorCode::kZeroNorm: return "ZeroNorm";
    case ErrorCode::kBasisExhausted: return "BasisExhausted";
  }
  return "Unknown";
}

ErrorCategory category(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCascadeViolation:
    case ErrorCode::kControllabilityViolation:
    case ErrorCode::kNonPositiveDiffusion:
    case ErrorCode::kDegenerateBoundary:
    case ErrorCode::kUnsupportedBoundary:
    case ErrorCode::kBadShape:
    case ErrorCode::kBadInput:
      return ErrorCategory::kInput;
    case ErrorCode::kHypothesisHViolated:
      return ErrorCategory::kHypothesis;
    default:
      return ErrorCategory::kInternal;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace cascade_stab
