#include "microlocal/errors.hpp"

namespace microlocal {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::EmptyPolyhedron: return "empty_polyhedron";
    case ErrorCode::NotInSet: return "not_in_set";
    case ErrorCode::EstimateOnly: return "estimate_only";
    case ErrorCode::HypothesisViolated: return "hypothesis_violated";
    case ErrorCode::ParameterInconsistency: return "parameter_inconsistency";
    case ErrorCode::NonDifferentiable: return "non_differentiable";
    case ErrorCode::DivisionByZero: return "division_by_zero";
    case ErrorCode::UnboundedBelow: return "unbounded_below";
    case ErrorCode::UnboundedSet: return "unbounded_set";
    case ErrorCode::NotProperCone: return "not_proper_cone";
    case ErrorCode::NotInjective: return "not_injective";
    case ErrorCode::NotLowDimensional: return "not_low_dimensional";
    case ErrorCode::StratumMismatch: return "stratum_mismatch";
    case ErrorCode::MissingCodimension: return "missing_codimension";
    case ErrorCode::Unstable: return "unstable";
    case ErrorCode::Unsupported: return "unsupported";
    case ErrorCode::Parse: return "parse_error";
    case ErrorCode::Schema: return "schema_violation";
  }
  return "unknown";
}

}  // namespace microlocal
