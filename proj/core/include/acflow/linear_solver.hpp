#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "acflow/sparse.hpp"

namespace acflow {

inline constexpr double kSolveTolerance = 1e-10;

/// Reusable sparse direct factorization.
///
/// Immutable once built; solve() is const and reentrant so one factorization
/// can serve any number of right-hand sides from several threads. Every solve
/// is checked against ||A x - b|| <= tol ||b|| (1e-10 by default) and polished
/// by iterative refinement when the raw direct solve falls short.
class Factorization {
 public:
  enum class Method { automatic, cholesky, lu };

  explicit Factorization(const SparseMatrix& matrix, Method method = Method::automatic);

  std::vector<double> solve(std::span<const double> rhs, double tol = kSolveTolerance) const;
  std::size_t size() const;
  Method method() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

inline Factorization factorize(const SparseMatrix& matrix) { return Factorization(matrix); }
inline std::vector<double> solve(const Factorization& f, std::span<const double> rhs) { return f.solve(rhs); }

/// Number of factorizations performed by this process so far.
std::uint64_t factorization_events();

double relative_residual(const SparseMatrix& a, std::span<const double> x, std::span<const double> b);

struct IterativeResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Applies z = P^{-1} r.
using Preconditioner = std::function<void(std::span<const double> r, std::span<double> z)>;

/// Jacobi-preconditioned conjugate gradients for symmetric positive definite systems.
IterativeResult solve_cg(const SparseMatrix& a, std::span<const double> b, double tol = kSolveTolerance,
                         int max_iter = 0);

/// Right-preconditioned BiCGSTAB for general systems.
IterativeResult solve_bicgstab(const SparseMatrix& a, std::span<const double> b, const Preconditioner& precond,
                               std::span<const double> x0, double tol = kSolveTolerance, int max_iter = 200);

/// Symmetric elimination of Dirichlet dofs: constrained rows and columns are
/// zeroed with a unit diagonal, and the right-hand side is lifted so the
/// solution takes the prescribed values.
class DirichletConstraint {
 public:
  DirichletConstraint() = default;
  DirichletConstraint(std::size_t n, std::vector<int> dofs);

  std::span<const int> dofs() const { return dofs_; }
  bool empty() const { return dofs_.empty(); }
  bool is_constrained(std::size_t i) const { return mask_[i] != 0; }

  SparseMatrix constrain(const SparseMatrix& a) const;
  /// rhs <- rhs - A g on free rows, rhs[d] = g[d] on constrained rows. `a` is
  /// the unconstrained matrix; `values` lists one value per constrained dof.
  void lift(const SparseMatrix& a, std::span<double> rhs, std::span<const double> values) const;

 private:
  std::size_t n_ = 0;
  std::vector<int> dofs_;
  std::vector<char> mask_;
};

struct ConstrainedSystem {
  SparseMatrix matrix;
  std::vector<double> rhs;
};

ConstrainedSystem apply_dirichlet(const SparseMatrix& a, std::span<const double> rhs, std::span<const int> dofs,
                                  std::span<const double> values);

}  // namespace acflow
