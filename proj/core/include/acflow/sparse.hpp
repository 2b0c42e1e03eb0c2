#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace acflow {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Square matrix in compressed row storage.
///
/// Column indices are strictly increasing within each row. Explicit zeros are
/// allowed, so matrices assembled on the same space share one pattern and can
/// be combined entry by entry.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t n, std::vector<int> row_ptr, std::vector<int> cols, std::vector<double> values);

  static SparseMatrix identity(std::size_t n);
  /// Duplicate entries are summed.
  static SparseMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets);

  std::size_t size() const { return n_; }
  std::size_t nnz() const { return cols_.size(); }

  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> cols() const { return cols_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Position of (i, j) in values(), or -1 when not in the pattern.
  std::ptrdiff_t find(int i, int j) const;
  double at(int i, int j) const;

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;

  bool same_pattern(const SparseMatrix& other) const;
  /// this += alpha * other; patterns must match.
  SparseMatrix& add_scaled(double alpha, const SparseMatrix& other);
  SparseMatrix& scale(double alpha);

  double max_abs() const;
  /// max |a_ij - a_ji| over the pattern.
  double asymmetry() const;

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b);

 private:
  std::size_t n_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> values_;
};

double norm2(std::span<const double> v);

}  // namespace acflow
