#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace acflow {

enum class ErrorCode {
  invalid_parameter,
  generation_failed,
  parse_error,
  validation_error,
  space_mismatch,
  factorization_failed,
  point_not_found,
  step_failed,
  invalid_state,
  material_law_error,
  division_by_nonpositive_density,
  source_evaluation_error,
  config_error,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable category alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace acflow
