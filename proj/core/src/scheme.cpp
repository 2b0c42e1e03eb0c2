#include "acflow/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "acflow/error.hpp"

namespace acflow {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorCode::invalid_state, std::string("non-finite ") + what);
  }
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

SchemeParams init_parameters(const ScalarField& rho0, const ScalarField& eta0, double tau, double lambda_user,
                             SchemeVariant variant, GradDivCoefficient grad_div) {
  if (!(tau > 0.0)) throw Error(ErrorCode::invalid_parameter, "time step must be positive");
  if (!(lambda_user > 0.0)) throw Error(ErrorCode::invalid_parameter, "lambda must be positive");
  if (rho0.size() != eta0.size() || rho0.size() == 0) {
    throw Error(ErrorCode::space_mismatch, "density and viscosity fields differ in size");
  }
  double nu_max = 0.0;
  double rho_min = rho0[0];
  for (std::size_t i = 0; i < rho0.size(); ++i) {
    if (!(rho0[i] > 0.0)) {
      throw Error(ErrorCode::invalid_state, "nonpositive initial density " + std::to_string(rho0[i]) + " at dof " +
                                                std::to_string(i));
    }
    if (!std::isfinite(eta0[i])) throw Error(ErrorCode::invalid_state, "non-finite initial viscosity");
    nu_max = std::max(nu_max, eta0[i] / rho0[i]);
    rho_min = std::min(rho_min, rho0[i]);
  }
  SchemeParams p;
  p.tau = tau;
  p.lambda_user = lambda_user;
  p.variant = variant;
  p.grad_div = grad_div;
  p.nu_bar = 1.1 * nu_max;
  p.rho_under = rho_min;
  p.lambda_eff = std::max(1.0, p.nu_bar * p.rho_under) * lambda_user;
  p.lambda_bar = 1.1 * p.lambda_eff / p.rho_under;
  if (!(p.nu_bar > 0.0)) throw Error(ErrorCode::invalid_state, "initial viscosity must be positive somewhere");
  return p;
}

VectorField recover_velocity(const VectorField& m, const ScalarField& rho) {
  const std::size_t n = m.num_nodes();
  if (rho.size() != n) throw Error(ErrorCode::space_mismatch, "density and momentum have different node counts");
  VectorField u(m.space_ptr());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(rho[i] > 0.0)) {
      throw Error(ErrorCode::division_by_nonpositive_density,
                  "density " + std::to_string(rho[i]) + " at dof " + std::to_string(i));
    }
    u.x()[i] = m.x()[i] / rho[i];
    u.y()[i] = m.y()[i] / rho[i];
  }
  return u;
}

// ---------------------------------------------------------------------------

MomentumStepper::MomentumStepper(std::shared_ptr<const FeSpace> space, const SchemeParams& params)
    : space_(std::move(space)), params_(params), assembler_(space_) {
  if (!(params_.tau > 0.0)) throw Error(ErrorCode::invalid_parameter, "time step must be positive");
  const std::size_t n = space_->num_dofs();
  std::vector<int> dofs;
  for (int d : space_->boundary_dofs()) dofs.push_back(d);
  for (int d : space_->boundary_dofs()) dofs.push_back(static_cast<int>(n) + d);
  constraint_ = DirichletConstraint(2 * n, std::move(dofs));

  mass_ = assembler_.assemble(form::Mass{}, Components::vector);
  grad_div_ = assembler_.assemble(form::GradDiv{}, Components::vector);
  coupling_ = assembler_.assemble(form::StiffnessEps{}, Components::vector);
  coupling_.scale(params_.strain_factor() * params_.nu_bar);
  coupling_.add_scaled(params_.grad_div_coefficient(), grad_div_);
  base_ = assemble_implicit_operator();
  base_factor_.emplace(constraint_.constrain(base_));
  ++factorizations_;
}

SparseMatrix MomentumStepper::assemble_implicit_operator() const {
  SparseMatrix a = assembler_.assemble(form::Mass{}, Components::vector);
  a.scale(1.0 / params_.tau);
  a.add_scaled(params_.strain_factor() * params_.nu_bar, assembler_.assemble(form::StiffnessEps{}, Components::vector));
  a.add_scaled(params_.grad_div_coefficient(), assembler_.assemble(form::GradDiv{}, Components::vector));
  return a;
}

void MomentumStepper::check_inputs(const FlowState& state, const ScalarField& rho_next,
                                   const ScalarField& eta_next) const {
  const auto same = [this](const FeSpace& s) { return s.shares_mesh(*space_) && s.num_dofs() == space_->num_dofs(); };
  if (!same(state.m.space()) || !same(state.u.space()) || !same(rho_next.space()) || !same(eta_next.space())) {
    throw Error(ErrorCode::space_mismatch, "momentum inputs do not live on the velocity space");
  }
  if (!state.p.space().shares_mesh(*space_)) throw Error(ErrorCode::space_mismatch, "pressure lives on another mesh");
  require_finite(state.m.values(), "momentum");
  require_finite(state.u.values(), "velocity");
  require_finite(state.p.values(), "pressure");
  require_finite(rho_next.values(), "density");
  require_finite(eta_next.values(), "viscosity");
}

std::vector<double> MomentumStepper::common_rhs(const FlowState& state, const ScalarField& rho_next,
                                                const ScalarField& eta_next, double t_next,
                                                const VectorFunction* force) const {
  const std::size_t n = space_->num_dofs();
  std::vector<double> rhs = mass_ * state.m.values();
  for (double& v : rhs) v /= params_.tau;

  // m* = rho^{n+1} u^n, nodal
  std::vector<double> m_star(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    m_star[i] = rho_next[i] * state.u.x()[i];
    m_star[n + i] = rho_next[i] * state.u.y()[i];
  }
  const auto coupled = coupling_ * std::span<const double>(m_star);
  const auto strain = strain_load(state.u, &eta_next);
  const auto grad_p = gradient_load(state.p, *space_);
  const auto div_u = grad_div_ * state.u.values();
  const double s = params_.strain_factor();
  for (std::size_t i = 0; i < 2 * n; ++i) {
    rhs[i] += coupled[i] - s * strain[i] - grad_p[i] - params_.lambda_eff * div_u[i];
  }
  if (force != nullptr && *force) {
    const auto f = assemble_rhs(*space_, *force, t_next);
    for (std::size_t i = 0; i < 2 * n; ++i) rhs[i] += f[i];
  }
  return rhs;
}

std::vector<double> MomentumStepper::boundary_values(double t_next, const VectorFunction* boundary) const {
  const auto dofs = constraint_.dofs();
  std::vector<double> g(dofs.size(), 0.0);
  if (boundary == nullptr || !*boundary) return g;
  const auto nb = dofs.size() / 2;
  for (std::size_t k = 0; k < nb; ++k) {
    const Vec2 v = (*boundary)(space_->dof_point(dofs[k]), t_next);
    g[k] = v.x;
    g[nb + k] = v.y;
  }
  return g;
}

VectorField MomentumStepper::step(const FlowState& state, const ScalarField& rho_next, const ScalarField& eta_next,
                                  double t_next, const VectorFunction* force, const VectorFunction* boundary) {
  return params_.variant == SchemeVariant::semi_implicit
             ? step_semi_implicit(state, rho_next, eta_next, t_next, force, boundary)
             : step_explicit(state, rho_next, eta_next, t_next, force, boundary);
}

VectorField MomentumStepper::step_explicit(const FlowState& state, const ScalarField& rho_next,
                                           const ScalarField& eta_next, double t_next, const VectorFunction* force,
                                           const VectorFunction* boundary) {
  check_inputs(state, rho_next, eta_next);
  auto rhs = common_rhs(state, rho_next, eta_next, t_next, force);
  const auto conv = transport_load(state.u, state.m);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= conv[i];
  constraint_.lift(base_, rhs, boundary_values(t_next, boundary));
  last_iterations_ = 0;
  VectorField m(space_, base_factor_->solve(rhs));
  require_finite(m.values(), "momentum after solve");
  return m;
}

VectorField MomentumStepper::step_semi_implicit(const FlowState& state, const ScalarField& rho_next,
                                                const ScalarField& eta_next, double t_next,
                                                const VectorFunction* force, const VectorFunction* boundary) {
  check_inputs(state, rho_next, eta_next);
  auto rhs = common_rhs(state, rho_next, eta_next, t_next, force);
  SparseMatrix a = base_;
  a.add_scaled(1.0, assembler_.assemble(form::Convection{&state.u}, Components::vector));
  constraint_.lift(a, rhs, boundary_values(t_next, boundary));
  const SparseMatrix ac = constraint_.constrain(a);

  const Factorization& pre = *base_factor_;
  auto precond = [&pre](std::span<const double> r, std::span<double> z) {
    const auto x = pre.solve(r);
    std::copy(x.begin(), x.end(), z.begin());
  };
  auto res = solve_bicgstab(ac, rhs, precond, state.m.values(), kSolveTolerance, 200);
  last_iterations_ = res.iterations;
  std::vector<double> x;
  if (res.converged) {
    x = std::move(res.x);
  } else {
    const Factorization lu(ac, Factorization::Method::lu);
    ++factorizations_;
    x = lu.solve(rhs);
  }
  VectorField m(space_, std::move(x));
  require_finite(m.values(), "momentum after solve");
  return m;
}

// ---------------------------------------------------------------------------

PressureUpdater::PressureUpdater(std::shared_ptr<const FeSpace> pressure_space)
    : space_(std::move(pressure_space)),
      mass_(assemble_form(space_, form::Mass{}, Components::scalar)),
      factor_(mass_, Factorization::Method::cholesky) {}

ScalarField PressureUpdater::project_divergence(const VectorField& u) const {
  if (!u.space().shares_mesh(*space_)) throw Error(ErrorCode::space_mismatch, "velocity lives on another mesh");
  const auto b = divergence_load(u, *space_);
  try {
    return ScalarField(space_, factor_.solve(b, kProjectionTolerance));
  } catch (const Error& e) {
    throw Error(ErrorCode::step_failed, std::string("divergence projection: ") + e.what());
  }
}

ScalarField PressureUpdater::update(const ScalarField& p, const VectorField& u_next, double lambda_eff) const {
  if (p.size() != space_->num_dofs()) throw Error(ErrorCode::space_mismatch, "pressure is not on the P1 space");
  const ScalarField div = project_divergence(u_next);
  ScalarField out(space_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = p[i] - lambda_eff * div[i];
  return out;
}

double PressureUpdater::identity_residual(const ScalarField& p, const ScalarField& p_next, const VectorField& u_next,
                                          double lambda_eff) const {
  const ScalarField div = project_divergence(u_next);
  double r = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) r = std::max(r, std::abs(p_next[i] - p[i] + lambda_eff * div[i]));
  return r;
}

// ---------------------------------------------------------------------------

FlowState make_initial_state(const std::shared_ptr<const FeSpace>& p2, const std::shared_ptr<const FeSpace>& p1,
                             const MaterialLaw& law, const InitialCondition& initial) {
  if (!initial.phi) throw Error(ErrorCode::invalid_parameter, "initial level set is required");
  FlowState s{0,
              initial.t0,
              interpolate(p2, initial.phi, initial.t0),
              ScalarField(p2),
              ScalarField(p2),
              VectorField(p2),
              initial.u ? interpolate(p2, initial.u, initial.t0) : VectorField(p2),
              initial.p ? interpolate(p1, initial.p, initial.t0) : ScalarField(p1)};
  auto [rho, eta] = reconstruct_materials(s.phi, law);
  s.rho = std::move(rho);
  s.eta = std::move(eta);
  const std::size_t n = p2->num_dofs();
  for (std::size_t i = 0; i < n; ++i) {
    s.m.x()[i] = s.rho[i] * s.u.x()[i];
    s.m.y()[i] = s.rho[i] * s.u.y()[i];
  }
  return s;
}

Integrator::Integrator(std::shared_ptr<const Mesh> mesh, MaterialLaw law, FlowForcing forcing,
                       IntegratorOptions options, const InitialCondition& initial)
    : mesh_(std::move(mesh)),
      p2_(std::make_shared<const FeSpace>(mesh_, 2)),
      p1_(std::make_shared<const FeSpace>(mesh_, 1)),
      law_(std::move(law)),
      forcing_(std::move(forcing)),
      options_(options),
      initial_(make_initial_state(p2_, p1_, law_, initial)) {
  params_ = init_parameters(initial_.rho, initial_.eta, options_.tau, options_.lambda_user, options_.variant,
                            options_.grad_div);
  params_.unit_strain_factor = options_.unit_strain_factor;
  levelset_.emplace(p2_, options_.tau, options_.levelset, options_.phi_bc, options_.variant);
  momentum_.emplace(p2_, params_);
  pressure_.emplace(p1_);
}

FlowState Integrator::advance(const FlowState& state) {
  const double t_next = state.t + params_.tau;
  const int step = state.step + 1;
  const char* stage = "level set";
  try {
    FlowState next{step, t_next, ScalarField(p2_), ScalarField(p2_), ScalarField(p2_),
                   VectorField(p2_), VectorField(p2_), ScalarField(p1_)};
    const ScalarFunction* fphi = forcing_.levelset_source ? &forcing_.levelset_source : nullptr;
    const ScalarFunction* gphi = forcing_.levelset_boundary ? &forcing_.levelset_boundary : nullptr;
    next.phi = levelset_->step(state.phi, state.u, t_next, fphi, gphi);
    checks_.levelset_iterations = levelset_->last_iterations();

    stage = "materials";
    auto [rho, eta] = reconstruct_materials(next.phi, law_);
    next.rho = std::move(rho);
    next.eta = std::move(eta);

    stage = "momentum";
    const VectorFunction* fm = forcing_.momentum_source ? &forcing_.momentum_source : nullptr;
    const VectorFunction* gm = forcing_.momentum_boundary ? &forcing_.momentum_boundary : nullptr;
    next.m = momentum_->step(state, next.rho, next.eta, t_next, fm, gm);
    checks_.momentum_iterations = momentum_->last_iterations();

    stage = "velocity";
    next.u = recover_velocity(next.m, next.rho);

    stage = "pressure";
    next.p = pressure_->update(state.p, next.u, params_.lambda_eff);

    if (options_.check_invariants) {
      stage = "invariants";
      checks_.pressure_identity = pressure_->identity_residual(state.p, next.p, next.u, params_.lambda_eff);
      const std::size_t n = p2_->num_dofs();
      double worst = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(next.rho[i] * next.u.x()[i] - next.m.x()[i]));
        worst = std::max(worst, std::abs(next.rho[i] * next.u.y()[i] - next.m.y()[i]));
      }
      const double scale = max_abs(next.m.values());
      checks_.momentum_consistency = scale > 0.0 ? worst / scale : worst;
      if (checks_.pressure_identity > kProjectionTolerance) {
        throw Error(ErrorCode::invalid_state,
                    "pressure update identity violated: " + std::to_string(checks_.pressure_identity));
      }
      if (checks_.momentum_consistency > 1e-13) {
        throw Error(ErrorCode::invalid_state,
                    "rho u = m violated: " + std::to_string(checks_.momentum_consistency));
      }
    }
    return next;
  } catch (const Error& e) {
    throw Error(e.code(), "step " + std::to_string(step) + " (" + stage + "): " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::step_failed, "step " + std::to_string(step) + " (" + stage + "): " + e.what());
  }
}

}  // namespace acflow
