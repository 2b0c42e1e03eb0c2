#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "acflow/diagnostics.hpp"
#include "acflow/mms.hpp"
#include "config.hpp"

namespace acflow::driver {

/// Outcome of one mesh level.
struct LevelResult {
  std::size_t level = 0;
  double h = 0.0;
  double h_global = 0.0;
  double tau = 0.0;
  int steps = 0;
  std::size_t n_dofs_u = 0;  // both components
  std::size_t n_dofs_p = 0;
  ErrorReport final;
  int factorizations = 0;
  double wall_seconds = 0.0;  // reported on stdout only, never written to CSV
};

/// Errors and monitors of a state against the case's exact solution.
ErrorReport measure(const ManufacturedCase& c, const FlowState& state, const SchemeParams& params);

/// Runs one mesh level; time series rows go to `timeseries` when non-null.
LevelResult run_level(const RunConfig& config, std::size_t level, std::ostream* timeseries);

/// Runs the first mesh level and writes timeseries.csv and summary.csv to
/// config.output_dir.
LevelResult run_single(const RunConfig& config);

/// Runs every level (in parallel up to ACFLOW_THREADS) and writes
/// level_<k>/{timeseries,summary}.csv, convergence.csv and, when enabled,
/// convergence.svg. Needs at least two levels.
std::vector<LevelResult> run_convergence(const RunConfig& config,
                                         const std::function<void(const LevelResult&)>& on_level = {});

/// Worker count: ACFLOW_THREADS if set and positive, else hardware concurrency.
unsigned thread_cap();

inline constexpr const char* kTimeseriesHeader = "step,t,err_u_L2,err_p_L2,err_phi,div_norm,overshoot,energy";
inline constexpr const char* kSummaryHeader =
    "case,variant,h,h_global,tau,steps,n_dofs_u,n_dofs_p,t,err_u_L2,err_p_L2,err_rho_L2,err_phi,div_norm,overshoot,"
    "energy,factorizations";
inline constexpr const char* kConvergenceHeader =
    "level,h,h_global,tau,n_dofs,err_u_L2,rate_u,err_p_L2,rate_p,err_rho_L2,rate_rho,err_phi,rate_phi";

void write_timeseries_row(std::ostream& out, const ErrorReport& r);
void write_summary(std::ostream& out, const RunConfig& config, const LevelResult& r);
void write_convergence(std::ostream& out, const std::vector<LevelResult>& levels);
/// Log-log plot of the four error columns against h with a slope-1 guide.
void write_convergence_svg(std::ostream& out, const std::string& title, const std::vector<LevelResult>& levels);

}  // namespace acflow::driver
