#include "acflow/mms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "acflow/error.hpp"

namespace acflow {

namespace {

// Rotating-interface solution on the unit disk:
//   u = s(t) (-sin^2 x sin y cos y, sin x cos x sin^2 y),  s = 3/4 + sin(t)/4
//   p = sin x sin y sin t
//   phi = 1/2 + 1/2 r cos(theta - a),  a = sin(t/2)
// r cos(theta - a) = x cos a + y sin a, so phi is affine in space and equals
// 1/2 at the origin. u is divergence free.
ManufacturedCase rotating_disk(std::string name, MaterialLaw law) {
  ManufacturedCase c;
  c.name = std::move(name);
  c.domain = DiskShape{1.0};
  c.law = std::move(law);
  c.final_time = 1.0;

  const auto s = [](double t) { return 0.75 + 0.25 * std::sin(t); };
  c.u = [s](Point2 x, double t) -> Vec2 {
    const double sx = std::sin(x.x), sy = std::sin(x.y);
    return {-s(t) * sx * sx * sy * std::cos(x.y), s(t) * sx * std::cos(x.x) * sy * sy};
  };
  c.u_t = [](Point2 x, double t) -> Vec2 {
    const double ds = 0.25 * std::cos(t);
    const double sx = std::sin(x.x), sy = std::sin(x.y);
    return {-ds * sx * sx * sy * std::cos(x.y), ds * sx * std::cos(x.x) * sy * sy};
  };
  c.grad_u = [s](Point2 x, double t) -> Mat2 {
    const double st = s(t);
    const double sx = std::sin(x.x), sy = std::sin(x.y);
    const double s2x = std::sin(2 * x.x), s2y = std::sin(2 * x.y);
    return {-0.5 * st * s2x * s2y, -st * sx * sx * std::cos(2 * x.y), st * std::cos(2 * x.x) * sy * sy,
            0.5 * st * s2x * s2y};
  };
  c.hess_u = [s](Point2 x, double t) -> VelocityHessian {
    const double st = s(t);
    const double sx = std::sin(x.x), sy = std::sin(x.y);
    const double s2x = std::sin(2 * x.x), s2y = std::sin(2 * x.y);
    const double c2x = std::cos(2 * x.x), c2y = std::cos(2 * x.y);
    const Mat2 h1{-st * c2x * s2y, -st * s2x * c2y, -st * s2x * c2y, 2 * st * sx * sx * s2y};
    const Mat2 h2{-2 * st * s2x * sy * sy, st * c2x * s2y, st * c2x * s2y, st * s2x * c2y};
    return {h1, h2};
  };
  c.p = [](Point2 x, double t) { return std::sin(x.x) * std::sin(x.y) * std::sin(t); };
  c.grad_p = [](Point2 x, double t) -> Vec2 {
    return {std::cos(x.x) * std::sin(x.y) * std::sin(t), std::sin(x.x) * std::cos(x.y) * std::sin(t)};
  };
  c.phi = [](Point2 x, double t) {
    const double a = std::sin(0.5 * t);
    return 0.5 + 0.5 * (x.x * std::cos(a) + x.y * std::sin(a));
  };
  c.grad_phi = [](Point2, double t) -> Vec2 {
    const double a = std::sin(0.5 * t);
    return {0.5 * std::cos(a), 0.5 * std::sin(a)};
  };
  c.phi_t = [](Point2 x, double t) {
    const double a = std::sin(0.5 * t);
    const double da = 0.5 * std::cos(0.5 * t);
    return 0.5 * da * (-x.x * std::sin(a) + x.y * std::cos(a));
  };
  return c;
}

// Sharp front moving up at unit speed on [0,1]x[-1,1]:
//   phi = 1 for y < t - 1/2, 0 otherwise (0 on the front itself)
//   u = (0, 1), p = x^2 y^3 cos t, rho = 1 + phi, eta = 1.
// u is constant, so f = grad p on both sides and f_phi = 0.
ManufacturedCase moving_front() {
  ManufacturedCase c;
  c.name = "slab_discontinuous_2d";
  c.domain = RectangleShape{0.0, 1.0, -1.0, 1.0};
  c.law = MaterialLaw::linear(1.0, 2.0, 1.0, 1.0);
  c.smoothness = Smoothness::discontinuous;
  c.final_time = 1.0;
  c.u = [](Point2, double) -> Vec2 { return {0.0, 1.0}; };
  c.u_t = [](Point2, double) -> Vec2 { return {0.0, 0.0}; };
  c.grad_u = [](Point2, double) -> Mat2 { return {}; };
  c.hess_u = [](Point2, double) -> VelocityHessian { return {}; };
  c.p = [](Point2 x, double t) { return x.x * x.x * x.y * x.y * x.y * std::cos(t); };
  c.grad_p = [](Point2 x, double t) -> Vec2 {
    return {2 * x.x * x.y * x.y * x.y * std::cos(t), 3 * x.x * x.x * x.y * x.y * std::cos(t)};
  };
  c.phi = [](Point2 x, double t) { return x.y < t - 0.5 ? 1.0 : 0.0; };
  c.grad_phi = [](Point2, double) -> Vec2 { return {0.0, 0.0}; };
  c.phi_t = [](Point2, double) { return 0.0; };
  c.momentum_source = c.grad_p;
  c.levelset_source = [](Point2, double) { return 0.0; };
  return c;
}

ManufacturedCase quiescent() {
  ManufacturedCase c;
  c.name = "quiescent";
  c.domain = RectangleShape{0.0, 1.0, 0.0, 1.0};
  c.law = MaterialLaw::linear(1.0, 100.0, 1.0, 10.0);
  c.final_time = 0.5;
  c.u = [](Point2, double) -> Vec2 { return {0.0, 0.0}; };
  c.u_t = c.u;
  c.grad_u = [](Point2, double) -> Mat2 { return {}; };
  c.hess_u = [](Point2, double) -> VelocityHessian { return {}; };
  c.p = [](Point2, double) { return 0.0; };
  c.grad_p = c.u;
  c.phi = [](Point2, double) { return 0.5; };
  c.grad_phi = c.u;
  c.phi_t = [](Point2, double) { return 0.0; };
  return c;
}

// Fourth-order central differences.
template <class F>
auto d1(const F& f, double h) {
  return (1.0 / (12 * h)) * (f(-2 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2 * h));
}
template <class F>
auto d2(const F& f, double h) {
  return (1.0 / (12 * h * h)) * (16.0 * f(-h) + 16.0 * f(h) - f(-2 * h) - f(2 * h) - 30.0 * f(0.0));
}

Vec2 shift(Point2 x, double dx, double dy) { return {x.x + dx, x.y + dy}; }

struct FdJacobian {
  Vec2 dx, dy;  // du/dx, du/dy
};

FdJacobian fd_jacobian(const VectorFunction& u, Point2 x, double t, double h) {
  return {d1([&](double e) { return u(shift(x, e, 0), t); }, h), d1([&](double e) { return u(shift(x, 0, e), t); }, h)};
}

double rel_dev(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1.0); }

}  // namespace

Vec2 analytic_momentum_residual(const ManufacturedCase& c, Point2 x, double t) {
  const double phi = c.phi(x, t);
  const double rho = c.law.density(phi);
  const double eta = c.law.viscosity(rho);
  const Vec2 grad_rho = (c.law.rho_max() - c.law.rho_min()) * c.grad_phi(x, t);
  const Vec2 grad_eta = c.law.viscosity_derivative(rho) * grad_rho;

  const Vec2 u = c.u(x, t);
  const Vec2 ut = c.u_t(x, t);
  const Mat2 j = c.grad_u(x, t);
  const VelocityHessian hs = c.hess_u(x, t);

  const Vec2 conv{j.xx * u.x + j.xy * u.y, j.yx * u.x + j.yy * u.y};
  // 2 div eps(u) = lap u + grad div u
  const Vec2 lap{hs[0].xx + hs[0].yy, hs[1].xx + hs[1].yy};
  const Vec2 grad_div{hs[0].xx + hs[1].xy, hs[0].xy + hs[1].yy};
  const double exy = 0.5 * (j.xy + j.yx);
  const Vec2 eps_grad_eta{j.xx * grad_eta.x + exy * grad_eta.y, exy * grad_eta.x + j.yy * grad_eta.y};
  const Vec2 viscous = eta * (lap + grad_div) + 2.0 * eps_grad_eta;
  const Vec2 gp = c.grad_p(x, t);
  return rho * (ut + conv) - viscous + gp;
}

Vec2 source_momentum(const ManufacturedCase& c, Point2 x, double t) {
  if (c.momentum_source) return c.momentum_source(x, t);
  return analytic_momentum_residual(c, x, t);
}

double source_levelset(const ManufacturedCase& c, Point2 x, double t) {
  if (c.levelset_source) return c.levelset_source(x, t);
  return c.phi_t(x, t) + dot(c.u(x, t), c.grad_phi(x, t));
}

Vec2 source_momentum_conservative(const ManufacturedCase& c, Point2 x, double t) {
  const double mass_source = (c.law.rho_max() - c.law.rho_min()) * source_levelset(c, x, t);
  return source_momentum(c, x, t) + mass_source * c.u(x, t);
}

FlowForcing case_forcing(const ManufacturedCase& c) {
  FlowForcing f;
  f.momentum_source = [c](Point2 x, double t) { return source_momentum_conservative(c, x, t); };
  f.levelset_source = [c](Point2 x, double t) { return source_levelset(c, x, t); };
  f.levelset_boundary = c.phi;
  f.momentum_boundary = [c](Point2 x, double t) { return c.momentum(x, t); };
  return f;
}

InitialCondition case_initial_condition(const ManufacturedCase& c, double t0) { return {c.phi, c.u, c.p, t0}; }

const std::vector<ManufacturedCase>& builtin_cases() {
  static const std::vector<ManufacturedCase> cases = [] {
    std::vector<ManufacturedCase> v;
    v.push_back(rotating_disk("disk_linear_eta_10", MaterialLaw::linear(1.0, 100.0, 1.0, 10.0)));
    v.push_back(rotating_disk("disk_linear_eta_inv100", MaterialLaw::linear(1.0, 100.0, 0.01, 1.0)));
    v.push_back(rotating_disk("disk_reciprocal_eta", MaterialLaw::reciprocal(1.0, 100.0)));
    v.push_back(moving_front());
    v.push_back(quiescent());
    return v;
  }();
  return cases;
}

const ManufacturedCase& find_case(const std::string& name) {
  for (const auto& c : builtin_cases()) {
    if (c.name == name) return c;
  }
  std::string known;
  for (const auto& c : builtin_cases()) known += (known.empty() ? "" : ", ") + c.name;
  throw Error(ErrorCode::invalid_parameter, "unknown case '" + name + "' (known: " + known + ")");
}

namespace fd {

namespace {

// -2 div(eta eps(u)) + grad p, with eps from differences of u.
Vec2 stress_and_pressure(const ManufacturedCase& c, Point2 x, double t, double h) {
  const auto stress = [&](Point2 y) -> std::array<double, 3> {
    const FdJacobian g = fd_jacobian(c.u, y, t, h);
    const double eta = c.law.viscosity(c.law.density(c.phi(y, t)));
    return {eta * g.dx.x, eta * 0.5 * (g.dy.x + g.dx.y), eta * g.dy.y};
  };
  const auto dstress_dx = d1(
      [&](double e) {
        const auto s = stress(shift(x, e, 0));
        return Vec2{s[0], s[1]};
      },
      h);
  const auto dstress_dy = d1(
      [&](double e) {
        const auto s = stress(shift(x, 0, e));
        return Vec2{s[1], s[2]};
      },
      h);
  const Vec2 gp{d1([&](double e) { return c.p(shift(x, e, 0), t); }, h),
                d1([&](double e) { return c.p(shift(x, 0, e), t); }, h)};
  return gp - 2.0 * (dstress_dx + dstress_dy);
}

}  // namespace

Vec2 momentum_source(const ManufacturedCase& c, Point2 x, double t, double h) {
  const Vec2 u = c.u(x, t);
  const Vec2 ut = d1([&](double e) { return c.u(x, t + e); }, h);
  const FdJacobian g = fd_jacobian(c.u, x, t, h);
  const Vec2 conv = u.x * g.dx + u.y * g.dy;
  return c.law.density(c.phi(x, t)) * (ut + conv) + stress_and_pressure(c, x, t, h);
}

Vec2 momentum_source_conservative(const ManufacturedCase& c, Point2 x, double t, double h) {
  const auto m = [&](Point2 y, double s) { return c.law.density(c.phi(y, s)) * c.u(y, s); };
  const Vec2 u = c.u(x, t);
  const Vec2 mt = d1([&](double e) { return m(x, t + e); }, h);
  const Vec2 mx = d1([&](double e) { return m(shift(x, e, 0), t); }, h);
  const Vec2 my = d1([&](double e) { return m(shift(x, 0, e), t); }, h);
  return mt + u.x * mx + u.y * my + stress_and_pressure(c, x, t, h);
}

double levelset_source(const ManufacturedCase& c, Point2 x, double t, double h) {
  const double phi_t = d1([&](double e) { return c.phi(x, t + e); }, h);
  const Vec2 grad{d1([&](double e) { return c.phi(shift(x, e, 0), t); }, h),
                  d1([&](double e) { return c.phi(shift(x, 0, e), t); }, h)};
  return phi_t + dot(c.u(x, t), grad);
}

}  // namespace fd

OracleReport validate_case(const ManufacturedCase& c, int samples, unsigned seed, double h) {
  if (samples <= 0) throw Error(ErrorCode::invalid_parameter, "sample count must be positive");
  if (!(h > 0.0)) throw Error(ErrorCode::invalid_parameter, "difference step must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  OracleReport rep;
  rep.case_name = c.name;
  // keep every stencil point of a discontinuous case on one side of the front
  const double margin = 20 * h;

  const auto sample_point = [&]() -> Point2 {
    if (const auto* d = std::get_if<DiskShape>(&c.domain)) {
      const double r = d->radius * std::sqrt(unit(rng));
      const double a = 2 * std::numbers::pi * unit(rng);
      return {r * std::cos(a), r * std::sin(a)};
    }
    const auto& r = std::get<RectangleShape>(c.domain);
    return {r.x0 + (r.x1 - r.x0) * unit(rng), r.y0 + (r.y1 - r.y0) * unit(rng)};
  };
  const auto near_jump = [&](Point2 x, double t) {
    if (c.smoothness == Smoothness::smooth) return false;
    const double ref = c.phi(x, t);
    for (double dx : {-margin, 0.0, margin}) {
      for (double dy : {-margin, 0.0, margin}) {
        for (double dt : {-margin, 0.0, margin}) {
          if (c.phi(shift(x, dx, dy), t + dt) != ref) return true;
        }
      }
    }
    return false;
  };

  const auto track = [&](double dev, double& slot, Point2 x) {
    if (dev > slot) {
      slot = dev;
      rep.worst_point = x;
    }
  };

  int taken = 0;
  for (int guard = 0; taken < samples && guard < 100 * samples; ++guard) {
    const Point2 x = sample_point();
    const double t = unit(rng);
    if (near_jump(x, t)) continue;
    ++taken;

    const Vec2 fa = source_momentum(c, x, t);
    const Vec2 ff = fd::momentum_source(c, x, t, h);
    track(std::max(rel_dev(fa.x, ff.x), rel_dev(fa.y, ff.y)), rep.momentum_deviation, x);
    if (c.momentum_source) {
      const Vec2 fg = analytic_momentum_residual(c, x, t);
      track(std::max(rel_dev(fg.x, ff.x), rel_dev(fg.y, ff.y)), rep.momentum_deviation, x);
    }
    const Vec2 ca = source_momentum_conservative(c, x, t);
    const Vec2 cf = fd::momentum_source_conservative(c, x, t, h);
    track(std::max(rel_dev(ca.x, cf.x), rel_dev(ca.y, cf.y)), rep.momentum_deviation, x);
    track(rel_dev(source_levelset(c, x, t), fd::levelset_source(c, x, t, h)), rep.levelset_deviation, x);

    // derivative closures one by one
    double dev = 0.0;
    const Mat2 j = c.grad_u(x, t);
    const FdJacobian g = fd_jacobian(c.u, x, t, h);
    for (auto [a, b] : {std::pair{j.xx, g.dx.x}, {j.xy, g.dy.x}, {j.yx, g.dx.y}, {j.yy, g.dy.y}}) {
      dev = std::max(dev, rel_dev(a, b));
    }
    const VelocityHessian hs = c.hess_u(x, t);
    const Vec2 uxx = d2([&](double e) { return c.u(shift(x, e, 0), t); }, h);
    const Vec2 uyy = d2([&](double e) { return c.u(shift(x, 0, e), t); }, h);
    const Vec2 uxy = d1([&](double e) { return fd_jacobian(c.u, shift(x, 0, e), t, h).dx; }, h);
    for (auto [a, b] : {std::pair{hs[0].xx, uxx.x}, {hs[0].yy, uyy.x}, {hs[0].xy, uxy.x}, {hs[0].yx, uxy.x},
                        {hs[1].xx, uxx.y}, {hs[1].yy, uyy.y}, {hs[1].xy, uxy.y}, {hs[1].yx, uxy.y}}) {
      dev = std::max(dev, rel_dev(a, b));
    }
    const Vec2 ut = d1([&](double e) { return c.u(x, t + e); }, h);
    const Vec2 uta = c.u_t(x, t);
    dev = std::max({dev, rel_dev(uta.x, ut.x), rel_dev(uta.y, ut.y)});
    const Vec2 gpa = c.grad_p(x, t);
    dev = std::max({dev, rel_dev(gpa.x, d1([&](double e) { return c.p(shift(x, e, 0), t); }, h)),
                    rel_dev(gpa.y, d1([&](double e) { return c.p(shift(x, 0, e), t); }, h))});
    const Vec2 gphi = c.grad_phi(x, t);
    dev = std::max({dev, rel_dev(gphi.x, d1([&](double e) { return c.phi(shift(x, e, 0), t); }, h)),
                    rel_dev(gphi.y, d1([&](double e) { return c.phi(shift(x, 0, e), t); }, h)),
                    rel_dev(c.phi_t(x, t), d1([&](double e) { return c.phi(x, t + e); }, h))});
    track(dev, rep.derivative_deviation, x);
  }
  rep.samples = taken;
  if (taken < samples) throw Error(ErrorCode::validation_error, "could not place enough oracle sample points");
  return rep;
}

}  // namespace acflow
