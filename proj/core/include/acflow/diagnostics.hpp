#pragma once

#include <span>
#include <vector>

#include "acflow/fe_space.hpp"
#include "acflow/scheme.hpp"

namespace acflow {

enum class Norm { L2, L1 };

/// ||field - exact|| / ||exact||, or the absolute norm (flagged) when
/// ||exact|| < 1e-14.
struct ErrorValue {
  double value = 0.0;
  bool absolute = false;
};

/// Cells on which the exact function is not constant over a probe set are
/// split uniformly up to `refine` times (4^refine children), which keeps
/// quadrature error on discontinuous exact fields below the discretization
/// error. Use 0 for smooth fields.
ErrorValue relative_error(const ScalarField& field, const ScalarFunction& exact, double t, Norm norm = Norm::L2,
                          int refine = 0);
ErrorValue relative_error(const VectorField& field, const VectorFunction& exact, double t, Norm norm = Norm::L2);

/// rate_k = log(e_{k-1} / e_k) / log(h_{k-1} / h_k); one fewer entry than the inputs.
std::vector<double> convergence_rate(std::span<const double> errors, std::span<const double> h);

/// Terms of E = ||sqrt(rho) u||^2 + 2 tau nu_bar ||sqrt(rho) eps(u)||^2
///            + tau lambda_bar ||sqrt(rho) div u||^2 + (tau / lambda_eff) ||p||^2.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double viscous = 0.0;
  double grad_div = 0.0;
  double pressure = 0.0;
  double total() const { return kinetic + viscous + grad_div + pressure; }
};

EnergyBreakdown energy(const FlowState& state, const SchemeParams& params);

struct Monitors {
  double div_norm = 0.0;  // ||div u||_L2
  double overshoot = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
};

Monitors monitors(const FlowState& state);

double divergence_norm(const VectorField& u);

/// L2 norm of the discrete transport residual
///   (phi_next - phi) / tau + u . grad phi_next - f_phi(t_next),
/// i.e. what the level-set stabilization (artificial viscosity and
/// compression) injects into the density equation in one step.
double transport_residual(const ScalarField& phi, const ScalarField& phi_next, const VectorField& u, double tau,
                          const ScalarFunction* source, double t_next);

/// One row of a run's time series.
struct ErrorReport {
  int step = 0;
  double t = 0.0;
  ErrorValue err_u;
  ErrorValue err_p;
  ErrorValue err_rho;
  ErrorValue err_phi;  // L2 for smooth level sets, L1 otherwise
  double div_norm = 0.0;
  double overshoot = 0.0;
  double energy = 0.0;
};

}  // namespace acflow
