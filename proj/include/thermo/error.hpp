#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace thermo {

enum class ErrorCode {
  EmptyRowOrColumn,
  CombinatorialOverflow,
  InvalidArgument,
  DegenerateBeta,
  WordTooShort,
  SystemMismatch,
  DepthMismatch,
  NotIrreducible,
  ConvergenceFailure,
  NonFullBranch,
  NonMonotoneDerivative,
  SupportMismatch,
  OverflowGuard,
  SingularProduct,
  NonIrreducibleMeasure,
  DepthOverflow,
  ParseError,
  ValidationError,
};

std::string_view error_name(ErrorCode code);

// Every failure raised by the library carries a stable name so the CLI can
// report it in the run summary.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  [[nodiscard]] std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace thermo
