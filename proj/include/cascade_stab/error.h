#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cascade_stab {

enum class ErrorCode {
  // Plant and input validation.
  kCascadeViolation,
  kControllabilityViolation,
  kNonPositiveDiffusion,
  kDegenerateBoundary,
  kUnsupportedBoundary,
  kBadShape,
  kBadInput,
  // Hypothesis (H): the input projection matrix must be invertible.
  kHypothesisHViolated,
  // Internal failures; these indicate a bug or a broken numerical assumption.
  kRootBracketingFailure,
  kQuadratureNonConvergence,
  kIndexOutOfSupport,
  kResidualNonzero,
  kPolePlacementSingular,
  kRiccatiFailure,
  kCertificateViolation,
  kZeroNorm,
  kBasisExhausted,
};

/// Coarse grouping used for process exit codes.
enum class ErrorCategory { kInput = 1, kHypothesis = 2, kInternal = 3 };

std::string_view to_string(ErrorCode code);
ErrorCategory category(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }
  ErrorCategory category() const { return cascade_stab::category(code_); }

 private:
  ErrorCode code_;
};

}  // namespace cascade_stab
