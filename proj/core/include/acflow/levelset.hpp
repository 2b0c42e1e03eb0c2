#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>

#include "acflow/assembly.hpp"
#include "acflow/fe_space.hpp"
#include "acflow/linear_solver.hpp"

namespace acflow {

/// Density and dynamic viscosity as functions of the level set.
///
/// rho = rho_min + (rho_max - rho_min) * phi. The viscosity law is linear in
/// rho (eta_1 at rho_min, eta_2 at rho_max), reciprocal (eta = 1/rho), or a
/// user function with a known Lipschitz bound.
class MaterialLaw {
 public:
  enum class Kind { linear, reciprocal, custom };

  static MaterialLaw linear(double rho_min, double rho_max, double eta_1, double eta_2);
  static MaterialLaw reciprocal(double rho_min, double rho_max);
  static MaterialLaw custom(double rho_min, double rho_max, std::function<double(double)> eta,
                            std::function<double(double)> deta, double lipschitz);

  Kind kind() const { return kind_; }
  double rho_min() const { return rho_min_; }
  double rho_max() const { return rho_max_; }
  double lipschitz() const { return lipschitz_; }

  double density(double phi) const { return rho_min_ + (rho_max_ - rho_min_) * phi; }
  double viscosity(double rho) const;
  double viscosity_derivative(double rho) const;

 private:
  MaterialLaw(Kind kind, double rho_min, double rho_max);

  Kind kind_;
  double rho_min_;
  double rho_max_;
  double eta_1_ = 1.0;
  double eta_2_ = 1.0;
  double lipschitz_ = 0.0;
  std::function<double(double)> eta_;
  std::function<double(double)> deta_;
};

/// Nodal reconstruction of (rho, eta) from phi. No clipping is applied.
std::pair<ScalarField, ScalarField> reconstruct_materials(const ScalarField& phi, const MaterialLaw& law);

struct LevelSetParams {
  double c_visc = 0.125;  // nu_h = c_visc * h_K
  double c_comp = 0.0;
  double grad_floor = 1e-12;

  void validate() const;
};

enum class LevelSetBc { dirichlet_exact, natural };

enum class SchemeVariant { semi_implicit, explicit_transport };

/// max(0, max phi - 1) + max(0, -min phi), over the nodal values.
double overshoot(const ScalarField& phi);

/// Advances the level set with first-order artificial viscosity and optional
/// interface compression.
///
/// The time-independent operator M/tau + (nu_h grad, grad) is assembled and
/// factored once at construction. The explicit variant solves with it
/// directly; the semi-implicit variant adds the convection matrix of the
/// current velocity and solves with BiCGSTAB preconditioned by that same
/// factorization, falling back to a fresh LU when the iteration stalls.
class LevelSetStepper {
 public:
  LevelSetStepper(std::shared_ptr<const FeSpace> space, double tau, LevelSetParams params, LevelSetBc bc,
                  SchemeVariant variant);

  /// `source` may be null (f_phi = 0). `boundary` is required for dirichlet_exact.
  ScalarField step(const ScalarField& phi, const VectorField& u, double t_next, const ScalarFunction* source,
                   const ScalarFunction* boundary);
  ScalarField step_semi_implicit(const ScalarField& phi, const VectorField& u, double t_next,
                                 const ScalarFunction* source, const ScalarFunction* boundary);
  ScalarField step_explicit(const ScalarField& phi, const VectorField& u, double t_next, const ScalarFunction* source,
                            const ScalarFunction* boundary);

  /// The unconstrained time-independent operator held by this stepper.
  const SparseMatrix& implicit_operator() const { return base_; }
  /// Re-assembles the time-independent operator from scratch.
  SparseMatrix assemble_implicit_operator() const;

  /// (c_comp nu_h h^-1 phi (1 - phi) grad phi / max(|grad phi|, floor), grad psi_i).
  std::vector<double> compression_load(const ScalarField& phi) const;

  int factorizations() const { return factorizations_; }
  int last_iterations() const { return last_iterations_; }
  const LevelSetParams& params() const { return params_; }
  double tau() const { return tau_; }

 private:
  std::vector<double> explicit_rhs(const ScalarField& phi, double t_next, const ScalarFunction* source) const;
  std::vector<double> boundary_values(double t_next, const ScalarFunction* boundary) const;
  void check_inputs(const ScalarField& phi, const VectorField& u) const;

  std::shared_ptr<const FeSpace> space_;
  Assembler assembler_;
  double tau_;
  LevelSetParams params_;
  LevelSetBc bc_;
  SchemeVariant variant_;
  DirichletConstraint constraint_;
  SparseMatrix mass_;
  SparseMatrix base_;
  std::optional<Factorization> base_factor_;
  int factorizations_ = 0;
  int last_iterations_ = 0;
};

}  // namespace acflow
