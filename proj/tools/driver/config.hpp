#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "acflow/levelset.hpp"
#include "acflow/scheme.hpp"

namespace acflow::driver {

/// tau = h / divisor, or one explicit value per mesh level.
struct TauRule {
  std::optional<double> divisor;
  std::vector<double> values;
  double tau_for(std::size_t level, double h) const;
};

/// Everything needed to reproduce one run or one convergence study.
struct RunConfig {
  std::string case_name;
  SchemeVariant variant = SchemeVariant::semi_implicit;
  std::vector<double> h;  // strictly decreasing
  TauRule tau;
  std::optional<double> final_time;  // defaults to the case's final time
  double lambda_user = 1.0;
  double c_visc = 0.125;
  double c_comp = 0.0;
  std::optional<LevelSetBc> phi_bc;  // defaults to the case's choice
  GradDivCoefficient grad_div = GradDivCoefficient::lambda_bar;
  bool unit_strain_factor = false;
  std::filesystem::path output_dir = "acflow_out";
  std::uint64_t seed = 0;
  bool plot = true;
  int record_every = 1;  // time series row interval; the final step is always written

  double final_time_for_case() const;
  int steps_for(std::size_t level) const;
  IntegratorOptions integrator_options(std::size_t level) const;
};

/// Parses a JSON config (comments allowed). Every problem is reported as a
/// config-error naming the offending field path, e.g. "tau.divisor".
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Cross-field checks: known case, decreasing h, tau <= T, T a multiple of tau.
void validate(const RunConfig& config);

/// Mesh sizes used when a convergence config omits "h".
std::vector<double> default_levels(bool full);

}  // namespace acflow::driver
