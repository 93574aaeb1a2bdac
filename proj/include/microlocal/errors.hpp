#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace microlocal {

/// Machine-readable failure categories. The CLI maps them to exit codes and
/// JSON reason strings.
enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  EmptyPolyhedron,
  NotInSet,
  EstimateOnly,
  HypothesisViolated,
  ParameterInconsistency,
  NonDifferentiable,
  DivisionByZero,
  UnboundedBelow,
  UnboundedSet,
  NotProperCone,
  NotInjective,
  NotLowDimensional,
  StratumMismatch,
  MissingCodimension,
  Unstable,
  Unsupported,
  Parse,
  Schema,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace microlocal
