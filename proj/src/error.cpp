#include "rubric/error.hpp"

namespace rubric {

namespace {

std::string with_line(const std::string& message, std::optional<int> line) {
  if (!line) return message;
  return "line " + std::to_string(*line) + ": " + message;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<int> line)
    : std::runtime_error(with_line(message, line)), code_(code), line_(line) {}

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kUnbalancedParens: return "UnbalancedParens";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnknownSymbol: return "UnknownSymbol";
    case ErrorCode::kProbSumMismatch: return "ProbSumMismatch";
    case ErrorCode::kCycleDetected: return "CycleDetected";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kSupportTooLarge: return "SupportTooLarge";
    case ErrorCode::kForeignDerivation: return "ForeignDerivation";
    case ErrorCode::kTooFewEntries: return "TooFewEntries";
    case ErrorCode::kNonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kNonFiniteFitness: return "NonFiniteFitness";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

ErrorCategory error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFiniteFitness:
      return ErrorCategory::kNumerical;
    case ErrorCode::kInvalidArgument:
      return ErrorCategory::kUsage;
    default:
      return ErrorCategory::kData;
  }
}

}  // namespace rubric
