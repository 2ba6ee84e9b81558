#include "thermo/error.hpp"

namespace thermo {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyRowOrColumn: return "EmptyRowOrColumn";
    case ErrorCode::CombinatorialOverflow: return "CombinatorialOverflow";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateBeta: return "DegenerateBeta";
    case ErrorCode::WordTooShort: return "WordTooShort";
    case ErrorCode::SystemMismatch: return "SystemMismatch";
    case ErrorCode::DepthMismatch: return "DepthMismatch";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NonFullBranch: return "NonFullBranch";
    case ErrorCode::NonMonotoneDerivative: return "NonMonotoneDerivative";
    case ErrorCode::SupportMismatch: return "SupportMismatch";
    case ErrorCode::OverflowGuard: return "OverflowGuard";
    case ErrorCode::SingularProduct: return "SingularProduct";
    case ErrorCode::NonIrreducibleMeasure: return "NonIrreducibleMeasure";
    case ErrorCode::DepthOverflow: return "DepthOverflow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "UnknownError";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

}  // namespace thermo
