#include "acflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "acflow/error.hpp"
#include "acflow/levelset.hpp"

namespace acflow {

namespace {

using Bary = std::array<double, 3>;

struct Accum {
  double diff = 0.0;
  double exact = 0.0;
};

double norm_power(double v, Norm norm) { return norm == Norm::L2 ? v * v : std::abs(v); }

ErrorValue finish(const Accum& a, Norm norm) {
  const double d = norm == Norm::L2 ? std::sqrt(a.diff) : a.diff;
  const double e = norm == Norm::L2 ? std::sqrt(a.exact) : a.exact;
  if (e < 1e-14) return {d, true};
  return {d / e, false};
}

// Integrates over a sub-triangle given by three barycentric corners of its parent cell.
void integrate_sub(const FeSpace& space, std::span<const double> coeffs, std::size_t cell, const CellGeometry& g,
                   const std::array<Bary, 3>& corners, double area, const ScalarFunction& exact, double t, Norm norm,
                   int depth_left, Accum& acc) {
  const auto& rule = triangle_rule();
  const auto to_parent = [&](const Bary& l) {
    Bary b{};
    for (int k = 0; k < 3; ++k) {
      for (int c = 0; c < 3; ++c) b[c] += l[k] * corners[k][c];
    }
    return b;
  };

  std::array<double, 7> ex{};
  for (int q = 0; q < 7; ++q) ex[q] = exact(g.map(to_parent(rule[q].bary)), t);
  if (depth_left > 0) {
    bool uniform = true;
    for (int q = 1; q < 7 && uniform; ++q) uniform = ex[q] == ex[0];
    for (int k = 0; k < 3 && uniform; ++k) uniform = exact(g.map(corners[k]), t) == ex[0];
    if (!uniform) {
      const auto mid = [](const Bary& a, const Bary& b) {
        return Bary{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
      };
      const Bary m01 = mid(corners[0], corners[1]), m12 = mid(corners[1], corners[2]), m20 = mid(corners[2], corners[0]);
      const double a4 = 0.25 * area;
      for (const auto& sub : {std::array<Bary, 3>{corners[0], m01, m20}, std::array<Bary, 3>{m01, corners[1], m12},
                              std::array<Bary, 3>{m20, m12, corners[2]}, std::array<Bary, 3>{m12, m20, m01}}) {
        integrate_sub(space, coeffs, cell, g, sub, a4, exact, t, norm, depth_left - 1, acc);
      }
      return;
    }
  }
  const auto dofs = space.cell_dofs(cell);
  std::array<double, 6> vals{};
  std::array<Vec2, 6> grads{};
  for (int q = 0; q < 7; ++q) {
    eval_basis(space.degree(), to_parent(rule[q].bary), g.grad_bary, vals, grads);
    double fh = 0.0;
    for (int i = 0; i < space.local_dofs(); ++i) fh += vals[i] * coeffs[dofs[i]];
    const double w = rule[q].weight * area;
    acc.diff += w * norm_power(fh - ex[q], norm);
    acc.exact += w * norm_power(ex[q], norm);
  }
}

Mat2 eval_jacobian(const CellBasis& cb, int q, const VectorField& u) {
  const Vec2 gx = cb.eval_grad(q, u.x());
  const Vec2 gy = cb.eval_grad(q, u.y());
  return {gx.x, gx.y, gy.x, gy.y};
}

}  // namespace

ErrorValue relative_error(const ScalarField& field, const ScalarFunction& exact, double t, Norm norm, int refine) {
  if (refine < 0) throw Error(ErrorCode::invalid_parameter, "refinement depth must be nonnegative");
  const FeSpace& space = field.space();
  Accum acc;
  const std::array<Bary, 3> whole{Bary{1, 0, 0}, Bary{0, 1, 0}, Bary{0, 0, 1}};
  for (std::size_t k = 0; k < space.mesh().num_triangles(); ++k) {
    const CellGeometry g = cell_geometry(space.mesh(), k);
    integrate_sub(space, field.values(), k, g, whole, g.area, exact, t, norm, refine, acc);
  }
  return finish(acc, norm);
}

ErrorValue relative_error(const VectorField& field, const VectorFunction& exact, double t, Norm norm) {
  const FeSpace& space = field.space();
  Accum acc;
  for (std::size_t k = 0; k < space.mesh().num_triangles(); ++k) {
    const CellBasis cb(space, k);
    for (int q = 0; q < CellBasis::kPoints; ++q) {
      const Vec2 e = exact(cb.point(q), t);
      const Vec2 d{cb.eval(q, field.x()) - e.x, cb.eval(q, field.y()) - e.y};
      if (norm == Norm::L2) {
        acc.diff += cb.weight(q) * dot(d, d);
        acc.exact += cb.weight(q) * dot(e, e);
      } else {
        acc.diff += cb.weight(q) * std::hypot(d.x, d.y);
        acc.exact += cb.weight(q) * std::hypot(e.x, e.y);
      }
    }
  }
  return finish(acc, norm);
}

std::vector<double> convergence_rate(std::span<const double> errors, std::span<const double> h) {
  if (errors.size() != h.size() || errors.size() < 2) {
    throw Error(ErrorCode::invalid_parameter, "convergence rates need two or more (error, h) pairs");
  }
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (!(errors[k] > 0.0) || !(h[k] > 0.0)) {
      throw Error(ErrorCode::invalid_parameter, "errors and mesh sizes must be positive");
    }
  }
  std::vector<double> rates;
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (h[k] == h[k - 1]) throw Error(ErrorCode::invalid_parameter, "repeated mesh size");
    rates.push_back(std::log(errors[k - 1] / errors[k]) / std::log(h[k - 1] / h[k]));
  }
  return rates;
}

EnergyBreakdown energy(const FlowState& state, const SchemeParams& params) {
  const FeSpace& p2 = state.u.space();
  const FeSpace& p1 = state.p.space();
  EnergyBreakdown e;
  for (std::size_t k = 0; k < p2.mesh().num_triangles(); ++k) {
    const CellBasis cb(p2, k);
    const CellBasis cp(p1, k);
    for (int q = 0; q < CellBasis::kPoints; ++q) {
      const double w = cb.weight(q);
      const double rho = cb.eval(q, state.rho.values());
      const Vec2 u{cb.eval(q, state.u.x()), cb.eval(q, state.u.y())};
      const Mat2 j = eval_jacobian(cb, q, state.u);
      const double exy = 0.5 * (j.xy + j.yx);
      const double eps2 = j.xx * j.xx + 2 * exy * exy + j.yy * j.yy;
      const double div = j.xx + j.yy;
      const double p = cp.eval(q, state.p.values());
      e.kinetic += w * rho * dot(u, u);
      e.viscous += w * rho * eps2;
      e.grad_div += w * rho * div * div;
      e.pressure += w * p * p;
    }
  }
  e.viscous *= 2 * params.tau * params.nu_bar;
  e.grad_div *= params.tau * params.lambda_bar;
  e.pressure *= params.tau / params.lambda_eff;
  return e;
}

double divergence_norm(const VectorField& u) {
  const FeSpace& space = u.space();
  double s = 0.0;
  for (std::size_t k = 0; k < space.mesh().num_triangles(); ++k) {
    const CellBasis cb(space, k);
    for (int q = 0; q < CellBasis::kPoints; ++q) {
      const double div = cb.eval_grad(q, u.x()).x + cb.eval_grad(q, u.y()).y;
      s += cb.weight(q) * div * div;
    }
  }
  return std::sqrt(s);
}

Monitors monitors(const FlowState& state) {
  Monitors m;
  m.div_norm = divergence_norm(state.u);
  m.overshoot = overshoot(state.phi);
  const auto r = state.rho.values();
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  m.rho_min = *lo;
  m.rho_max = *hi;
  return m;
}

double transport_residual(const ScalarField& phi, const ScalarField& phi_next, const VectorField& u, double tau,
                          const ScalarFunction* source, double t_next) {
  const FeSpace& space = phi.space();
  double s = 0.0;
  for (std::size_t k = 0; k < space.mesh().num_triangles(); ++k) {
    const CellBasis cb(space, k);
    for (int q = 0; q < CellBasis::kPoints; ++q) {
      const Vec2 uq{cb.eval(q, u.x()), cb.eval(q, u.y())};
      double r = (cb.eval(q, phi_next.values()) - cb.eval(q, phi.values())) / tau +
                 dot(uq, cb.eval_grad(q, phi_next.values()));
      if (source != nullptr && *source) r -= (*source)(cb.point(q), t_next);
      s += cb.weight(q) * r * r;
    }
  }
  return std::sqrt(s);
}

}  // namespace acflow
