#include "acflow/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "acflow/error.hpp"

namespace acflow {

SparseMatrix::SparseMatrix(std::size_t n, std::vector<int> row_ptr, std::vector<int> cols, std::vector<double> values)
    : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), values_(std::move(values)) {
  if (row_ptr_.size() != n_ + 1 || row_ptr_.front() != 0 ||
      static_cast<std::size_t>(row_ptr_.back()) != cols_.size() || cols_.size() != values_.size()) {
    throw Error(ErrorCode::invalid_parameter, "inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      if (cols_[p] < 0 || static_cast<std::size_t>(cols_[p]) >= n_ ||
          (p > row_ptr_[i] && cols_[p] <= cols_[p - 1])) {
        throw Error(ErrorCode::invalid_parameter, "CSR row " + std::to_string(i) + " has unsorted or invalid columns");
      }
    }
  }
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<int> rp(n + 1), cols(n);
  for (std::size_t i = 0; i <= n; ++i) rp[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < n; ++i) cols[i] = static_cast<int>(i);
  return SparseMatrix(n, std::move(rp), std::move(cols), std::vector<double>(n, 1.0));
}

SparseMatrix SparseMatrix::from_triplets(std::size_t n, std::vector<Triplet> t) {
  for (const auto& e : t) {
    if (e.row < 0 || e.col < 0 || static_cast<std::size_t>(e.row) >= n || static_cast<std::size_t>(e.col) >= n) {
      throw Error(ErrorCode::invalid_parameter, "triplet index out of range");
    }
  }
  std::stable_sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<int> rp(n + 1, 0), cols;
  std::vector<double> vals;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k > 0 && t[k].row == t[k - 1].row && t[k].col == t[k - 1].col) {
      vals.back() += t[k].value;
      continue;
    }
    cols.push_back(t[k].col);
    vals.push_back(t[k].value);
    ++rp[t[k].row + 1];
  }
  for (std::size_t i = 0; i < n; ++i) rp[i + 1] += rp[i];
  return SparseMatrix(n, std::move(rp), std::move(cols), std::move(vals));
}

std::ptrdiff_t SparseMatrix::find(int i, int j) const {
  const auto begin = cols_.begin() + row_ptr_[i];
  const auto end = cols_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return -1;
  return it - cols_.begin();
}

double SparseMatrix::at(int i, int j) const {
  const auto p = find(i, j);
  return p < 0 ? 0.0 : values_[p];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += values_[p] * x[cols_[p]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
  if (x.size() != n_) throw Error(ErrorCode::invalid_parameter, "matrix-vector size mismatch");
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  return n_ == other.n_ && row_ptr_ == other.row_ptr_ && cols_ == other.cols_;
}

SparseMatrix& SparseMatrix::add_scaled(double alpha, const SparseMatrix& other) {
  if (!same_pattern(other)) throw Error(ErrorCode::space_mismatch, "matrix patterns differ");
  for (std::size_t p = 0; p < values_.size(); ++p) values_[p] += alpha * other.values_[p];
  return *this;
}

SparseMatrix& SparseMatrix::scale(double alpha) {
  for (double& v : values_) v *= alpha;
  return *this;
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double SparseMatrix::asymmetry() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      m = std::max(m, std::abs(values_[p] - at(cols_[p], static_cast<int>(i))));
    }
  }
  return m;
}

bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
  return a.same_pattern(b) && a.values_ == b.values_;
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace acflow
