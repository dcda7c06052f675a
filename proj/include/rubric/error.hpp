#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rubric {

enum class ErrorCode {
  kEmptyInput,
  kUnbalancedParens,
  kSyntaxError,
  kUnknownSymbol,
  kProbSumMismatch,
  kCycleDetected,
  kUnknownLabel,
  kSupportTooLarge,
  kForeignDerivation,
  kTooFewEntries,
  kNonPositiveWeight,
  kEmptyTable,
  kNonFiniteFitness,
  kDimensionMismatch,
  kSchemaMismatch,
  kInvalidArgument,
  kFormatError,
  kIoError,
};

// Coarse classification used by the CLI to pick an exit status.
enum class ErrorCategory { kUsage, kData, kNumerical };

std::string_view error_code_name(ErrorCode code);
ErrorCategory error_category(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<int> line = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  // 1-based source line for rubric syntax errors.
  std::optional<int> line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::optional<int> line_;
};

}  // namespace rubric
