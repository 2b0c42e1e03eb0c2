#pragma once

#include <memory>
#include <optional>
#include <string>

#include "acflow/assembly.hpp"
#include "acflow/fe_space.hpp"
#include "acflow/levelset.hpp"
#include "acflow/linear_solver.hpp"

namespace acflow {

/// Which coefficient multiplies the implicit grad-div term of the momentum solve.
enum class GradDivCoefficient { lambda_bar, lambda_eff };

/// Constant bounds that make the implicit momentum operator time independent.
struct SchemeParams {
  double tau = 0.0;
  double lambda_user = 1.0;
  double lambda_eff = 1.0;  // max(1, nu_bar * rho_under) * lambda_user
  double nu_bar = 0.0;      // 1.1 * max eta0 / rho0
  double rho_under = 0.0;   // min rho0
  double lambda_bar = 0.0;  // 1.1 * lambda_eff / rho_under
  SchemeVariant variant = SchemeVariant::semi_implicit;
  GradDivCoefficient grad_div = GradDivCoefficient::lambda_bar;
  /// Explicit variant only: use nu_bar and eta (instead of 2 nu_bar and 2 eta)
  /// on the strain terms.
  bool unit_strain_factor = false;

  double grad_div_coefficient() const { return grad_div == GradDivCoefficient::lambda_bar ? lambda_bar : lambda_eff; }
  double strain_factor() const {
    return (unit_strain_factor && variant == SchemeVariant::explicit_transport) ? 1.0 : 2.0;
  }
};

/// Computes nu_bar, rho_under, lambda_eff and lambda_bar from the initial
/// density and viscosity. The lambda rescaling is applied before lambda_bar.
SchemeParams init_parameters(const ScalarField& rho0, const ScalarField& eta0, double tau, double lambda_user,
                             SchemeVariant variant, GradDivCoefficient grad_div = GradDivCoefficient::lambda_bar);

/// Snapshot of every unknown at time t. phi, rho, eta, m, u are P2; p is P1.
struct FlowState {
  int step = 0;
  double t = 0.0;
  ScalarField phi;
  ScalarField rho;
  ScalarField eta;
  VectorField m;
  VectorField u;
  ScalarField p;
};

/// u_i = m_i / rho_i for both components. Throws
/// division-by-nonpositive-density if any rho_i <= 0.
VectorField recover_velocity(const VectorField& m, const ScalarField& rho);

/// Momentum solve with the time-independent operator
///   A0 = M / tau + s nu_bar K_eps + gamma G,   s = 2 (or 1, see SchemeParams),
/// assembled and factored once. Dirichlet dofs are all boundary dofs of both
/// components.
class MomentumStepper {
 public:
  MomentumStepper(std::shared_ptr<const FeSpace> space, const SchemeParams& params);

  /// `force` may be null (f = 0); `boundary` gives m on the boundary, null
  /// for homogeneous data.
  VectorField step(const FlowState& state, const ScalarField& rho_next, const ScalarField& eta_next, double t_next,
                   const VectorFunction* force, const VectorFunction* boundary);
  VectorField step_semi_implicit(const FlowState& state, const ScalarField& rho_next, const ScalarField& eta_next,
                                 double t_next, const VectorFunction* force, const VectorFunction* boundary);
  VectorField step_explicit(const FlowState& state, const ScalarField& rho_next, const ScalarField& eta_next,
                            double t_next, const VectorFunction* force, const VectorFunction* boundary);

  const SparseMatrix& implicit_operator() const { return base_; }
  SparseMatrix assemble_implicit_operator() const;

  int factorizations() const { return factorizations_; }
  int last_iterations() const { return last_iterations_; }

 private:
  std::vector<double> common_rhs(const FlowState& state, const ScalarField& rho_next, const ScalarField& eta_next,
                                 double t_next, const VectorFunction* force) const;
  std::vector<double> boundary_values(double t_next, const VectorFunction* boundary) const;
  void check_inputs(const FlowState& state, const ScalarField& rho_next, const ScalarField& eta_next) const;

  std::shared_ptr<const FeSpace> space_;
  SchemeParams params_;
  Assembler assembler_;
  DirichletConstraint constraint_;
  SparseMatrix mass_;
  SparseMatrix coupling_;  // s nu_bar K_eps + gamma G
  SparseMatrix grad_div_;
  SparseMatrix base_;
  std::optional<Factorization> base_factor_;
  int factorizations_ = 0;
  int last_iterations_ = 0;
};

/// p_next = p - lambda_eff * P(div u_next), with P the L2 projection onto the
/// pressure space (its mass matrix is factored once).
class PressureUpdater {
 public:
  explicit PressureUpdater(std::shared_ptr<const FeSpace> pressure_space);

  ScalarField project_divergence(const VectorField& u) const;
  ScalarField update(const ScalarField& p, const VectorField& u_next, double lambda_eff) const;

  /// max |p_next - p + lambda_eff * P(div u_next)| for a completed update.
  double identity_residual(const ScalarField& p, const ScalarField& p_next, const VectorField& u_next,
                           double lambda_eff) const;

 private:
  std::shared_ptr<const FeSpace> space_;
  SparseMatrix mass_;
  Factorization factor_;
};

inline constexpr double kProjectionTolerance = 1e-12;

/// Source terms and boundary data. Empty functions mean zero data
/// (homogeneous Dirichlet for the momentum).
struct FlowForcing {
  VectorFunction momentum_source;
  ScalarFunction levelset_source;
  ScalarFunction levelset_boundary;
  VectorFunction momentum_boundary;
};

struct InitialCondition {
  ScalarFunction phi;
  VectorFunction u;
  ScalarFunction p;
  double t0 = 0.0;
};

struct IntegratorOptions {
  SchemeVariant variant = SchemeVariant::semi_implicit;
  double tau = 0.0;
  double lambda_user = 1.0;
  LevelSetParams levelset;
  LevelSetBc phi_bc = LevelSetBc::dirichlet_exact;
  GradDivCoefficient grad_div = GradDivCoefficient::lambda_bar;
  bool unit_strain_factor = false;
  /// Verify the pressure-update identity and rho u = m after every step.
  bool check_invariants = true;
};

/// Per-step invariant measurements recorded by Integrator::advance.
struct StepChecks {
  double pressure_identity = 0.0;       // max nodal residual of the pressure update
  double momentum_consistency = 0.0;    // max |rho u - m| / max |m|
  int levelset_iterations = 0;
  int momentum_iterations = 0;
};

/// One full time step: level set, materials, momentum, velocity, pressure.
class Integrator {
 public:
  Integrator(std::shared_ptr<const Mesh> mesh, MaterialLaw law, FlowForcing forcing, IntegratorOptions options,
             const InitialCondition& initial);

  const FlowState& initial_state() const { return initial_; }
  FlowState advance(const FlowState& state);

  const SchemeParams& params() const { return params_; }
  const MaterialLaw& law() const { return law_; }
  const std::shared_ptr<const FeSpace>& velocity_space() const { return p2_; }
  const std::shared_ptr<const FeSpace>& pressure_space() const { return p1_; }
  const LevelSetStepper& levelset() const { return *levelset_; }
  const MomentumStepper& momentum() const { return *momentum_; }
  const PressureUpdater& pressure() const { return *pressure_; }
  const StepChecks& last_checks() const { return checks_; }
  /// Factorizations performed by the level-set and momentum steppers.
  int factorizations() const { return levelset_->factorizations() + momentum_->factorizations(); }

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::shared_ptr<const FeSpace> p2_;
  std::shared_ptr<const FeSpace> p1_;
  MaterialLaw law_;
  FlowForcing forcing_;
  IntegratorOptions options_;
  FlowState initial_;
  SchemeParams params_;
  std::optional<LevelSetStepper> levelset_;
  std::optional<MomentumStepper> momentum_;
  std::optional<PressureUpdater> pressure_;
  StepChecks checks_;
};

/// Builds the state at t0 from nodal interpolants (m = rho u nodally).
FlowState make_initial_state(const std::shared_ptr<const FeSpace>& p2, const std::shared_ptr<const FeSpace>& p1,
                             const MaterialLaw& law, const InitialCondition& initial);

}  // namespace acflow
