#include "acflow/linear_solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <string>

#include "acflow/error.hpp"

namespace acflow {

namespace {

std::atomic<std::uint64_t> g_factorizations{0};

using EigenMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenMatrix to_eigen(const SparseMatrix& a) {
  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>> view(
      n, n, static_cast<Eigen::Index>(a.nnz()), a.row_ptr().data(), a.cols().data(), a.values().data());
  EigenMatrix out = view;
  out.makeCompressed();
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

struct Factorization::Impl {
  SparseMatrix matrix;
  Method method = Method::lu;
  Eigen::SimplicialLDLT<EigenMatrix> ldlt;
  Eigen::SparseLU<EigenMatrix> lu;

  Eigen::VectorXd raw_solve(const Eigen::VectorXd& b) const {
    return method == Method::cholesky ? Eigen::VectorXd(ldlt.solve(b)) : Eigen::VectorXd(lu.solve(b));
  }
};

Factorization::Factorization(const SparseMatrix& matrix, Method method) {
  auto impl = std::make_shared<Impl>();
  impl->matrix = matrix;
  if (method == Method::automatic) {
    method = matrix.asymmetry() <= 1e-13 * matrix.max_abs() ? Method::cholesky : Method::lu;
  }
  impl->method = method;
  const EigenMatrix a = to_eigen(matrix);
  ++g_factorizations;

  if (method == Method::cholesky) {
    impl->ldlt.compute(a);
    if (impl->ldlt.info() != Eigen::Success) {
      throw Error(ErrorCode::factorization_failed, "LDLT factorization failed (matrix not symmetric positive)");
    }
    const Eigen::VectorXd d = impl->ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    Eigen::Index worst = 0;
    const double dmin = d.cwiseAbs().minCoeff(&worst);
    if (!(dmin > 1e-14 * dmax) || !std::isfinite(dmax)) {
      std::ostringstream msg;
      msg << "zero pivot in LDLT: |d| = " << dmin << " at permuted position " << worst << " (max |d| = " << dmax
          << ")";
      throw Error(ErrorCode::factorization_failed, msg.str());
    }
  } else {
    impl->lu.analyzePattern(a);
    impl->lu.factorize(a);
    if (impl->lu.info() != Eigen::Success) {
      throw Error(ErrorCode::factorization_failed, "sparse LU failed: " + impl->lu.lastErrorMessage());
    }
  }
  impl_ = std::move(impl);
}

std::size_t Factorization::size() const { return impl_->matrix.size(); }
Factorization::Method Factorization::method() const { return impl_->method; }

std::vector<double> Factorization::solve(std::span<const double> rhs, double tol) const {
  const auto& a = impl_->matrix;
  if (rhs.size() != a.size()) throw Error(ErrorCode::invalid_parameter, "rhs size does not match factorization");
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXd x = impl_->raw_solve(b);

  const double bnorm = b.norm();
  std::vector<double> r(rhs.size());
  for (int pass = 0; pass < 6; ++pass) {
    a.multiply(std::span<const double>(x.data(), rhs.size()), r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
    const double rnorm = norm2(r);
    if (!std::isfinite(rnorm)) throw Error(ErrorCode::factorization_failed, "non-finite solution");
    if (rnorm <= tol * bnorm) return {x.data(), x.data() + x.size()};
    const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
    x += impl_->raw_solve(rv);
  }
  throw Error(ErrorCode::factorization_failed, "direct solve did not reach the residual tolerance");
}

std::uint64_t factorization_events() { return g_factorizations.load(); }

double relative_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
  std::vector<double> r = a * x;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  const double bn = norm2(b);
  return bn > 0.0 ? norm2(r) / bn : norm2(r);
}

IterativeResult solve_cg(const SparseMatrix& a, std::span<const double> b, double tol, int max_iter) {
  const std::size_t n = a.size();
  if (max_iter <= 0) max_iter = static_cast<int>(10 * n + 100);
  std::vector<double> inv_diag(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.at(static_cast<int>(i), static_cast<int>(i));
    if (d > 0.0) inv_diag[i] = 1.0 / d;
  }
  IterativeResult res;
  res.x.assign(n, 0.0);
  std::vector<double> r(b.begin(), b.end()), z(n), p(n), q(n);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    a.multiply(p, q);
    const double alpha = rz / dot(p, q);
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    res.iterations = it;
    res.relative_residual = norm2(r) / bnorm;
    if (res.relative_residual <= tol) break;
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  // Recompute the true residual; the recursive one drifts.
  res.relative_residual = relative_residual(a, res.x, b);
  res.converged = res.relative_residual <= tol;
  return res;
}

IterativeResult solve_bicgstab(const SparseMatrix& a, std::span<const double> b, const Preconditioner& precond,
                               std::span<const double> x0, double tol, int max_iter) {
  const std::size_t n = a.size();
  IterativeResult res;
  res.x.assign(x0.begin(), x0.end());
  if (res.x.size() != n) res.x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    res.x.assign(n, 0.0);
    res.converged = true;
    return res;
  }
  std::vector<double> r(n), r0(n), p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n);
  a.multiply(res.x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  r0 = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  res.relative_residual = norm2(r) / bnorm;
  for (int it = 1; it <= max_iter && res.relative_residual > tol; ++it) {
    const double rho_new = dot(r0, r);
    if (rho_new == 0.0) break;
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    precond(p, phat);
    a.multiply(phat, v);
    alpha = rho / dot(r0, v);
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    precond(s, shat);
    a.multiply(shat, t);
    const double tt = dot(t, t);
    omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * phat[i] + omega * shat[i];
      r[i] = s[i] - omega * t[i];
    }
    res.iterations = it;
    res.relative_residual = norm2(r) / bnorm;
    if (omega == 0.0) break;
  }
  res.relative_residual = relative_residual(a, res.x, b);
  res.converged = res.relative_residual <= tol;
  return res;
}

DirichletConstraint::DirichletConstraint(std::size_t n, std::vector<int> dofs)
    : n_(n), dofs_(std::move(dofs)), mask_(n, 0) {
  for (int d : dofs_) {
    if (d < 0 || static_cast<std::size_t>(d) >= n_) {
      throw Error(ErrorCode::invalid_parameter, "Dirichlet dof " + std::to_string(d) + " out of range");
    }
    if (mask_[d]) throw Error(ErrorCode::invalid_parameter, "Dirichlet dof " + std::to_string(d) + " listed twice");
    mask_[d] = 1;
  }
}

SparseMatrix DirichletConstraint::constrain(const SparseMatrix& a) const {
  if (a.size() != n_) throw Error(ErrorCode::invalid_parameter, "constraint size does not match matrix");
  SparseMatrix out = a;
  auto vals = out.values();
  const auto rp = out.row_ptr();
  const auto cols = out.cols();
  for (std::size_t i = 0; i < n_; ++i) {
    for (int p = rp[i]; p < rp[i + 1]; ++p) {
      const auto j = static_cast<std::size_t>(cols[p]);
      if (mask_[i] || mask_[j]) vals[p] = (i == j) ? 1.0 : 0.0;
    }
  }
  for (int d : dofs_) {
    if (out.find(d, d) < 0) throw Error(ErrorCode::invalid_parameter, "pattern lacks a diagonal entry");
  }
  return out;
}

void DirichletConstraint::lift(const SparseMatrix& a, std::span<double> rhs, std::span<const double> values) const {
  if (values.size() != dofs_.size()) {
    throw Error(ErrorCode::invalid_parameter, "one Dirichlet value is required per constrained dof");
  }
  if (dofs_.empty()) return;
  std::vector<double> g(n_, 0.0);
  for (std::size_t k = 0; k < dofs_.size(); ++k) g[dofs_[k]] = values[k];
  const auto rp = a.row_ptr();
  const auto cols = a.cols();
  const auto vals = a.values();
  for (std::size_t i = 0; i < n_; ++i) {
    if (mask_[i]) continue;
    double s = 0.0;
    for (int p = rp[i]; p < rp[i + 1]; ++p) {
      if (mask_[cols[p]]) s += vals[p] * g[cols[p]];
    }
    rhs[i] -= s;
  }
  for (std::size_t k = 0; k < dofs_.size(); ++k) rhs[dofs_[k]] = values[k];
}

ConstrainedSystem apply_dirichlet(const SparseMatrix& a, std::span<const double> rhs, std::span<const int> dofs,
                                  std::span<const double> values) {
  DirichletConstraint c(a.size(), std::vector<int>(dofs.begin(), dofs.end()));
  ConstrainedSystem out{c.constrain(a), std::vector<double>(rhs.begin(), rhs.end())};
  c.lift(a, out.rhs, values);
  return out;
}

}  // namespace acflow
