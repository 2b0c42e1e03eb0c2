#include "acflow/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "acflow/error.hpp"

namespace acflow {

MaterialLaw::MaterialLaw(Kind kind, double rho_min, double rho_max)
    : kind_(kind), rho_min_(rho_min), rho_max_(rho_max) {
  if (!(rho_min > 0.0) || !(rho_max >= rho_min) || !std::isfinite(rho_max)) {
    throw Error(ErrorCode::invalid_parameter, "material law needs 0 < rho_min <= rho_max");
  }
}

MaterialLaw MaterialLaw::linear(double rho_min, double rho_max, double eta_1, double eta_2) {
  MaterialLaw law(Kind::linear, rho_min, rho_max);
  law.eta_1_ = eta_1;
  law.eta_2_ = eta_2;
  law.lipschitz_ = rho_max > rho_min ? std::abs(eta_2 - eta_1) / (rho_max - rho_min) : 0.0;
  return law;
}

MaterialLaw MaterialLaw::reciprocal(double rho_min, double rho_max) {
  MaterialLaw law(Kind::reciprocal, rho_min, rho_max);
  law.lipschitz_ = 1.0 / (rho_min * rho_min);
  return law;
}

MaterialLaw MaterialLaw::custom(double rho_min, double rho_max, std::function<double(double)> eta,
                                std::function<double(double)> deta, double lipschitz) {
  if (!eta) throw Error(ErrorCode::invalid_parameter, "custom material law needs a viscosity function");
  MaterialLaw law(Kind::custom, rho_min, rho_max);
  law.eta_ = std::move(eta);
  law.deta_ = std::move(deta);
  law.lipschitz_ = lipschitz;
  return law;
}

double MaterialLaw::viscosity(double rho) const {
  switch (kind_) {
    case Kind::linear:
      if (rho_max_ == rho_min_) return eta_1_;
      return eta_1_ + (eta_2_ - eta_1_) / (rho_max_ - rho_min_) * (rho - rho_min_);
    case Kind::reciprocal:
      if (!(rho > 0.0)) {
        throw Error(ErrorCode::material_law_error, "reciprocal viscosity law at nonpositive density " +
                                                       std::to_string(rho));
      }
      return 1.0 / rho;
    case Kind::custom:
      return eta_(rho);
  }
  return 0.0;
}

double MaterialLaw::viscosity_derivative(double rho) const {
  switch (kind_) {
    case Kind::linear:
      return rho_max_ == rho_min_ ? 0.0 : (eta_2_ - eta_1_) / (rho_max_ - rho_min_);
    case Kind::reciprocal:
      return -1.0 / (rho * rho);
    case Kind::custom:
      return deta_ ? deta_(rho) : 0.0;
  }
  return 0.0;
}

std::pair<ScalarField, ScalarField> reconstruct_materials(const ScalarField& phi, const MaterialLaw& law) {
  ScalarField rho(phi.space_ptr());
  ScalarField eta(phi.space_ptr());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    rho[i] = law.density(phi[i]);
    eta[i] = law.viscosity(rho[i]);
  }
  return {std::move(rho), std::move(eta)};
}

void LevelSetParams::validate() const {
  if (!(c_visc >= 0.0) || !(c_comp >= 0.0) || !(grad_floor > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, "level-set parameters need c_visc >= 0, c_comp >= 0, grad_floor > 0");
  }
}

double overshoot(const ScalarField& phi) {
  const auto v = phi.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return std::max(0.0, *hi - 1.0) + std::max(0.0, -*lo);
}

LevelSetStepper::LevelSetStepper(std::shared_ptr<const FeSpace> space, double tau, LevelSetParams params,
                                 LevelSetBc bc, SchemeVariant variant)
    : space_(std::move(space)), assembler_(space_), tau_(tau), params_(params), bc_(bc), variant_(variant) {
  if (!(tau > 0.0)) throw Error(ErrorCode::invalid_parameter, "time step must be positive");
  params_.validate();
  if (bc_ == LevelSetBc::dirichlet_exact) {
    constraint_ = DirichletConstraint(space_->num_dofs(), space_->boundary_dofs());
  } else {
    constraint_ = DirichletConstraint(space_->num_dofs(), {});
  }
  mass_ = assembler_.assemble(form::Mass{}, Components::scalar);
  base_ = assemble_implicit_operator();
  base_factor_.emplace(constraint_.constrain(base_));
  ++factorizations_;
}

SparseMatrix LevelSetStepper::assemble_implicit_operator() const {
  const Mesh& mesh = space_->mesh();
  std::vector<double> nu(mesh.num_triangles());
  for (std::size_t k = 0; k < nu.size(); ++k) nu[k] = params_.c_visc * mesh.h_local(k);
  SparseMatrix a = assembler_.assemble(form::Mass{}, Components::scalar);
  a.scale(1.0 / tau_);
  a.add_scaled(1.0, assembler_.assemble(form::DiffusionScalar{Coefficient::per_cell(std::move(nu))}, Components::scalar));
  return a;
}

std::vector<double> LevelSetStepper::compression_load(const ScalarField& phi) const {
  const FeSpace& space = *space_;
  std::vector<double> b(space.num_dofs(), 0.0);
  for (std::size_t k = 0; k < space.mesh().num_triangles(); ++k) {
    const CellBasis cb(space, k);
    const double h = cb.geometry().h;
    const double nu_h = params_.c_visc * h;
    const double coef = params_.c_comp * nu_h / h;
    for (int q = 0; q < CellBasis::kPoints; ++q) {
      const double p = cb.eval(q, phi.values());
      const Vec2 g = cb.eval_grad(q, phi.values());
      const double gnorm = std::max(std::hypot(g.x, g.y), params_.grad_floor);
      const Vec2 flux = (cb.weight(q) * coef * p * (1.0 - p) / gnorm) * g;
      for (int i = 0; i < cb.size(); ++i) b[cb.dofs()[i]] += dot(flux, cb.grad(q, i));
    }
  }
  return b;
}

void LevelSetStepper::check_inputs(const ScalarField& phi, const VectorField& u) const {
  if (!phi.space().shares_mesh(*space_) || phi.size() != space_->num_dofs()) {
    throw Error(ErrorCode::space_mismatch, "level set does not live on the stepper's space");
  }
  if (!u.space().shares_mesh(*space_)) throw Error(ErrorCode::space_mismatch, "velocity lives on another mesh");
  for (double v : phi.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_state, "non-finite level set value");
  }
  for (double v : u.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::invalid_state, "non-finite velocity value");
  }
}

std::vector<double> LevelSetStepper::explicit_rhs(const ScalarField& phi, double t_next,
                                                  const ScalarFunction* source) const {
  std::vector<double> rhs = mass_ * phi.values();
  for (double& v : rhs) v /= tau_;
  if (params_.c_comp != 0.0) {
    const auto comp = compression_load(phi);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += comp[i];
  }
  if (source != nullptr && *source) {
    const auto f = assemble_rhs(*space_, *source, t_next);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += f[i];
  }
  return rhs;
}

std::vector<double> LevelSetStepper::boundary_values(double t_next, const ScalarFunction* boundary) const {
  std::vector<double> g;
  if (constraint_.empty()) return g;
  if (boundary == nullptr || !*boundary) {
    throw Error(ErrorCode::invalid_parameter, "dirichlet_exact level-set boundary needs boundary data");
  }
  g.reserve(constraint_.dofs().size());
  for (int d : constraint_.dofs()) g.push_back((*boundary)(space_->dof_point(d), t_next));
  return g;
}

ScalarField LevelSetStepper::step(const ScalarField& phi, const VectorField& u, double t_next,
                                  const ScalarFunction* source, const ScalarFunction* boundary) {
  return variant_ == SchemeVariant::semi_implicit ? step_semi_implicit(phi, u, t_next, source, boundary)
                                                  : step_explicit(phi, u, t_next, source, boundary);
}

ScalarField LevelSetStepper::step_explicit(const ScalarField& phi, const VectorField& u, double t_next,
                                           const ScalarFunction* source, const ScalarFunction* boundary) {
  check_inputs(phi, u);
  auto rhs = explicit_rhs(phi, t_next, source);
  const auto transport = transport_load(u, phi);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= transport[i];
  constraint_.lift(base_, rhs, boundary_values(t_next, boundary));
  last_iterations_ = 0;
  return ScalarField(space_, base_factor_->solve(rhs));
}

ScalarField LevelSetStepper::step_semi_implicit(const ScalarField& phi, const VectorField& u, double t_next,
                                                const ScalarFunction* source, const ScalarFunction* boundary) {
  check_inputs(phi, u);
  auto rhs = explicit_rhs(phi, t_next, source);
  SparseMatrix a = base_;
  a.add_scaled(1.0, assembler_.assemble(form::Convection{&u}, Components::scalar));
  constraint_.lift(a, rhs, boundary_values(t_next, boundary));
  const SparseMatrix ac = constraint_.constrain(a);

  const Factorization& pre = *base_factor_;
  auto precond = [&pre](std::span<const double> r, std::span<double> z) {
    const auto x = pre.solve(r);
    std::copy(x.begin(), x.end(), z.begin());
  };
  auto res = solve_bicgstab(ac, rhs, precond, phi.values(), kSolveTolerance, 100);
  last_iterations_ = res.iterations;
  if (!res.converged) {
    const Factorization lu(ac, Factorization::Method::lu);
    ++factorizations_;
    return ScalarField(space_, lu.solve(rhs));
  }
  return ScalarField(space_, std::move(res.x));
}

}  // namespace acflow
