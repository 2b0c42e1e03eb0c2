#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "acflow/fe_space.hpp"
#include "acflow/levelset.hpp"
#include "acflow/mesh.hpp"
#include "acflow/scheme.hpp"

namespace acflow {

enum class Smoothness { smooth, discontinuous };

/// Hessian of each velocity component: hess[c] = d^2 u_c, with xy == yx.
using VelocityHessian = std::array<Mat2, 2>;

/// Exact solution with analytic derivatives. grad_u is the Jacobian,
/// (xx, xy; yx, yy) = (du1/dx, du1/dy; du2/dx, du2/dy).
struct ManufacturedCase {
  std::string name;
  DomainShape domain = DiskShape{1.0};
  MaterialLaw law = MaterialLaw::linear(1.0, 1.0, 1.0, 1.0);
  Smoothness smoothness = Smoothness::smooth;
  double final_time = 1.0;
  LevelSetBc phi_bc = LevelSetBc::dirichlet_exact;

  VectorFunction u;
  std::function<Mat2(Point2, double)> grad_u;
  std::function<VelocityHessian(Point2, double)> hess_u;
  VectorFunction u_t;
  ScalarFunction p;
  VectorFunction grad_p;
  ScalarFunction phi;
  VectorFunction grad_phi;
  ScalarFunction phi_t;

  /// Hand-derived sources; when empty the generic strong-form residual of
  /// the analytic fields is used.
  VectorFunction momentum_source;
  ScalarFunction levelset_source;

  double rho(Point2 x, double t) const { return law.density(phi(x, t)); }
  Vec2 momentum(Point2 x, double t) const { return rho(x, t) * u(x, t); }
};

/// f = rho (u_t + (grad u) u) - 2 div(eta eps(u)) + grad p.
Vec2 source_momentum(const ManufacturedCase& c, Point2 x, double t);
/// f_phi = phi_t + u . grad phi.
double source_levelset(const ManufacturedCase& c, Point2 x, double t);

/// Forcing for the momentum form d_t m + (u . grad) m - 2 div(eta eps(u)) + grad p
/// with m = rho u, which is what the discrete momentum step solves. Where the
/// level set carries a source, d_t rho + u . grad rho = (rho_max - rho_min) f_phi,
/// so this equals f + (rho_max - rho_min) f_phi u. Drivers use this one.
Vec2 source_momentum_conservative(const ManufacturedCase& c, Point2 x, double t);

/// Generic residual from the analytic derivatives, ignoring any hand-derived override.
Vec2 analytic_momentum_residual(const ManufacturedCase& c, Point2 x, double t);

/// Sources and boundary data for an Integrator run of this case: the
/// momentum-form forcing, f_phi, exact phi on the boundary and exact rho u
/// as momentum Dirichlet data.
FlowForcing case_forcing(const ManufacturedCase& c);
/// Exact fields at t0.
InitialCondition case_initial_condition(const ManufacturedCase& c, double t0 = 0.0);

/// disk_linear_eta_10, disk_linear_eta_inv100, disk_reciprocal_eta,
/// slab_discontinuous_2d, quiescent.
const std::vector<ManufacturedCase>& builtin_cases();
/// Throws invalid-parameter for unknown names.
const ManufacturedCase& find_case(const std::string& name);

/// Central-difference reconstruction of the sources that only evaluates
/// u, p, phi and the material law (never the analytic derivatives).
namespace fd {
inline constexpr double kDefaultStep = 5e-4;
Vec2 momentum_source(const ManufacturedCase& c, Point2 x, double t, double step = kDefaultStep);
/// Differences d_t(rho u) and (u . grad)(rho u) directly.
Vec2 momentum_source_conservative(const ManufacturedCase& c, Point2 x, double t, double step = kDefaultStep);
double levelset_source(const ManufacturedCase& c, Point2 x, double t, double step = kDefaultStep);
}  // namespace fd

/// Largest deviation found by the oracle gate. Deviation is
/// |analytic - fd| / max(|analytic|, 1) componentwise.
struct OracleReport {
  std::string case_name;
  int samples = 0;
  double momentum_deviation = 0.0;
  double levelset_deviation = 0.0;
  double derivative_deviation = 0.0;  // analytic first/second/time derivatives vs differences
  Point2 worst_point;
  bool passed(double tol) const {
    return momentum_deviation <= tol && levelset_deviation <= tol && derivative_deviation <= tol;
  }
};

/// Compares analytic and finite-difference quantities at `samples` seeded
/// points inside the domain (away from any discontinuity), at random t in [0, 1].
OracleReport validate_case(const ManufacturedCase& c, int samples, unsigned seed, double step = fd::kDefaultStep);

}  // namespace acflow
