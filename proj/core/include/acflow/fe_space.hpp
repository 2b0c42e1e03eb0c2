#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "acflow/mesh.hpp"
#include "acflow/quadrature.hpp"

namespace acflow {

using Vec2 = Point2;
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// 2x2 tensor, row-major: (xx, xy; yx, yy).
struct Mat2 {
  double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;
};

using ScalarFunction = std::function<double(Point2, double)>;
using VectorFunction = std::function<Vec2(Point2, double)>;

/// Affine map data of one triangle.
struct CellGeometry {
  std::array<Point2, 3> vertices;
  std::array<Vec2, 3> grad_bary;  // gradients of the barycentric coordinates
  double area = 0.0;
  double h = 0.0;

  Point2 map(const std::array<double, 3>& bary) const {
    return {bary[0] * vertices[0].x + bary[1] * vertices[1].x + bary[2] * vertices[2].x,
            bary[0] * vertices[0].y + bary[1] * vertices[1].y + bary[2] * vertices[2].y};
  }
};

CellGeometry cell_geometry(const Mesh& mesh, std::size_t cell);

/// Continuous Lagrange space of degree 1 or 2.
///
/// P1 dofs are the vertices. P2 dofs are the vertices followed by the edge
/// midpoints (edge e -> dof num_vertices + e). Local P2 order is
/// v0, v1, v2, m01, m12, m20.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int local_dofs() const { return degree_ == 1 ? 3 : 6; }
  std::size_t num_dofs() const { return num_dofs_; }

  std::span<const int> cell_dofs(std::size_t cell) const {
    return {dof_map_.data() + cell * static_cast<std::size_t>(local_dofs()), static_cast<std::size_t>(local_dofs())};
  }

  Point2 dof_point(std::size_t dof) const { return dof_points_[dof]; }

  /// Sorted dofs lying on boundary edges with the given tag.
  const std::vector<int>& boundary_dofs(int tag) const;
  /// Sorted dofs lying on any boundary edge.
  const std::vector<int>& boundary_dofs() const { return all_boundary_; }

  bool shares_mesh(const FeSpace& other) const { return mesh_ == other.mesh_; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  std::size_t num_dofs_ = 0;
  std::vector<int> dof_map_;
  std::vector<Point2> dof_points_;
  std::map<int, std::vector<int>> boundary_by_tag_;
  std::vector<int> all_boundary_;
};

/// Basis values and gradients of one cell at the quadrature points of
/// triangle_rule().
class CellBasis {
 public:
  static constexpr int kPoints = 7;

  CellBasis(const FeSpace& space, std::size_t cell);

  const CellGeometry& geometry() const { return geom_; }
  std::span<const int> dofs() const { return dofs_; }
  int size() const { return n_; }

  double weight(int q) const { return weights_[q]; }
  Point2 point(int q) const { return points_[q]; }
  double value(int q, int i) const { return values_[q][i]; }
  Vec2 grad(int q, int i) const { return grads_[q][i]; }

  double eval(int q, std::span<const double> coeffs) const;
  Vec2 eval_grad(int q, std::span<const double> coeffs) const;

 private:
  CellGeometry geom_;
  std::span<const int> dofs_;
  int n_;
  std::array<double, kPoints> weights_{};
  std::array<Point2, kPoints> points_{};
  std::array<std::array<double, 6>, kPoints> values_{};
  std::array<std::array<Vec2, 6>, kPoints> grads_{};
};

/// Basis values at arbitrary barycentric coordinates.
void eval_basis(int degree, const std::array<double, 3>& bary, const std::array<Vec2, 3>& grad_bary,
                std::span<double> values, std::span<Vec2> grads);

class ScalarField {
 public:
  explicit ScalarField(std::shared_ptr<const FeSpace> space);
  ScalarField(std::shared_ptr<const FeSpace> space, std::vector<double> values);

  const FeSpace& space() const { return *space_; }
  const std::shared_ptr<const FeSpace>& space_ptr() const { return space_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::shared_ptr<const FeSpace> space_;
  std::vector<double> values_;
};

/// Vector field with blocked layout: all x-components, then all y-components.
class VectorField {
 public:
  explicit VectorField(std::shared_ptr<const FeSpace> space);
  VectorField(std::shared_ptr<const FeSpace> space, std::vector<double> values);

  const FeSpace& space() const { return *space_; }
  const std::shared_ptr<const FeSpace>& space_ptr() const { return space_; }
  std::size_t num_nodes() const { return space_->num_dofs(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> x() { return std::span(values_).first(num_nodes()); }
  std::span<const double> x() const { return std::span(values_).first(num_nodes()); }
  std::span<double> y() { return std::span(values_).subspan(num_nodes()); }
  std::span<const double> y() const { return std::span(values_).subspan(num_nodes()); }

  Vec2 node(std::size_t i) const { return {values_[i], values_[num_nodes() + i]}; }

 private:
  std::shared_ptr<const FeSpace> space_;
  std::vector<double> values_;
};

ScalarField interpolate(const std::shared_ptr<const FeSpace>& space, const ScalarFunction& f, double t = 0.0);
VectorField interpolate(const std::shared_ptr<const FeSpace>& space, const VectorFunction& f, double t = 0.0);

/// Locates the cell containing a point; throws point-not-found outside the mesh.
std::pair<std::size_t, std::array<double, 3>> locate(const Mesh& mesh, Point2 p);

double evaluate(const ScalarField& field, Point2 p);
Vec2 evaluate(const VectorField& field, Point2 p);

}  // namespace acflow
