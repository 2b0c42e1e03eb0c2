#include "acflow/error.hpp"

namespace acflow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::generation_failed: return "generation-failed";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::validation_error: return "validation-error";
    case ErrorCode::space_mismatch: return "space-mismatch";
    case ErrorCode::factorization_failed: return "factorization-failed";
    case ErrorCode::point_not_found: return "point-not-found";
    case ErrorCode::step_failed: return "step-failed";
    case ErrorCode::invalid_state: return "invalid-state";
    case ErrorCode::material_law_error: return "material-law-error";
    case ErrorCode::division_by_nonpositive_density: return "division-by-nonpositive-density";
    case ErrorCode::source_evaluation_error: return "source-evaluation-error";
    case ErrorCode::config_error: return "config-error";
  }
  return "unknown";
}

}  // namespace acflow
