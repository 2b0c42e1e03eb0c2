#include "acflow/fe_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "acflow/error.hpp"

namespace acflow {

CellGeometry cell_geometry(const Mesh& mesh, std::size_t cell) {
  CellGeometry g;
  const auto& t = mesh.triangles()[cell];
  for (int i = 0; i < 3; ++i) g.vertices[i] = mesh.vertices()[t[i]];
  const auto& p = g.vertices;
  g.area = mesh.signed_area(cell);
  const double inv = 1.0 / (2.0 * g.area);
  g.grad_bary[0] = {(p[1].y - p[2].y) * inv, (p[2].x - p[1].x) * inv};
  g.grad_bary[1] = {(p[2].y - p[0].y) * inv, (p[0].x - p[2].x) * inv};
  g.grad_bary[2] = {(p[0].y - p[1].y) * inv, (p[1].x - p[0].x) * inv};
  g.h = mesh.h_local(cell);
  return g;
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, int degree) : mesh_(std::move(mesh)), degree_(degree) {
  if (!mesh_) throw Error(ErrorCode::invalid_parameter, "space requires a mesh");
  if (degree_ != 1 && degree_ != 2) throw Error(ErrorCode::invalid_parameter, "only P1 and P2 are supported");

  const auto& m = *mesh_;
  const std::size_t nv = m.num_vertices();
  num_dofs_ = degree_ == 1 ? nv : nv + m.num_edges();
  dof_points_.assign(m.vertices().begin(), m.vertices().end());
  if (degree_ == 2) {
    for (const auto& e : m.edges()) dof_points_.push_back(0.5 * (m.vertices()[e[0]] + m.vertices()[e[1]]));
  }

  dof_map_.reserve(m.num_triangles() * static_cast<std::size_t>(local_dofs()));
  for (std::size_t k = 0; k < m.num_triangles(); ++k) {
    const auto& t = m.triangles()[k];
    dof_map_.insert(dof_map_.end(), t.begin(), t.end());
    if (degree_ == 2) {
      for (int e : m.triangle_edges(k)) dof_map_.push_back(static_cast<int>(nv) + e);
    }
  }

  for (std::size_t e = 0; e < m.num_edges(); ++e) {
    const int tag = m.edge_tags()[e];
    if (tag == 0) continue;
    auto& list = boundary_by_tag_[tag];
    list.push_back(m.edges()[e][0]);
    list.push_back(m.edges()[e][1]);
    if (degree_ == 2) list.push_back(static_cast<int>(nv + e));
  }
  for (auto& [tag, list] : boundary_by_tag_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    all_boundary_.insert(all_boundary_.end(), list.begin(), list.end());
  }
  std::sort(all_boundary_.begin(), all_boundary_.end());
  all_boundary_.erase(std::unique(all_boundary_.begin(), all_boundary_.end()), all_boundary_.end());
}

const std::vector<int>& FeSpace::boundary_dofs(int tag) const {
  static const std::vector<int> empty;
  auto it = boundary_by_tag_.find(tag);
  return it == boundary_by_tag_.end() ? empty : it->second;
}

void eval_basis(int degree, const std::array<double, 3>& l, const std::array<Vec2, 3>& g,
                std::span<double> values, std::span<Vec2> grads) {
  if (degree == 1) {
    for (int i = 0; i < 3; ++i) {
      values[i] = l[i];
      grads[i] = g[i];
    }
    return;
  }
  for (int i = 0; i < 3; ++i) {
    values[i] = l[i] * (2.0 * l[i] - 1.0);
    grads[i] = (4.0 * l[i] - 1.0) * g[i];
  }
  for (int e = 0; e < 3; ++e) {
    const int a = e;
    const int b = (e + 1) % 3;
    values[3 + e] = 4.0 * l[a] * l[b];
    grads[3 + e] = 4.0 * (l[a] * g[b] + l[b] * g[a]);
  }
}

CellBasis::CellBasis(const FeSpace& space, std::size_t cell)
    : geom_(cell_geometry(space.mesh(), cell)), dofs_(space.cell_dofs(cell)), n_(space.local_dofs()) {
  const auto& rule = triangle_rule();
  for (int q = 0; q < kPoints; ++q) {
    weights_[q] = rule[q].weight * geom_.area;
    points_[q] = geom_.map(rule[q].bary);
    eval_basis(space.degree(), rule[q].bary, geom_.grad_bary, values_[q], grads_[q]);
  }
}

double CellBasis::eval(int q, std::span<const double> coeffs) const {
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += values_[q][i] * coeffs[dofs_[i]];
  return s;
}

Vec2 CellBasis::eval_grad(int q, std::span<const double> coeffs) const {
  Vec2 s;
  for (int i = 0; i < n_; ++i) s = s + coeffs[dofs_[i]] * grads_[q][i];
  return s;
}

ScalarField::ScalarField(std::shared_ptr<const FeSpace> space)
    : space_(std::move(space)), values_(space_->num_dofs(), 0.0) {}

ScalarField::ScalarField(std::shared_ptr<const FeSpace> space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (values_.size() != space_->num_dofs()) {
    throw Error(ErrorCode::space_mismatch, "scalar field length does not match its space");
  }
}

VectorField::VectorField(std::shared_ptr<const FeSpace> space)
    : space_(std::move(space)), values_(2 * space_->num_dofs(), 0.0) {}

VectorField::VectorField(std::shared_ptr<const FeSpace> space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (values_.size() != 2 * space_->num_dofs()) {
    throw Error(ErrorCode::space_mismatch, "vector field length does not match its space");
  }
}

ScalarField interpolate(const std::shared_ptr<const FeSpace>& space, const ScalarFunction& f, double t) {
  ScalarField out(space);
  for (std::size_t i = 0; i < space->num_dofs(); ++i) out[i] = f(space->dof_point(i), t);
  return out;
}

VectorField interpolate(const std::shared_ptr<const FeSpace>& space, const VectorFunction& f, double t) {
  VectorField out(space);
  const std::size_t n = space->num_dofs();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 v = f(space->dof_point(i), t);
    out.values()[i] = v.x;
    out.values()[n + i] = v.y;
  }
  return out;
}

std::pair<std::size_t, std::array<double, 3>> locate(const Mesh& mesh, Point2 p) {
  // Pick the cell with the largest minimum barycentric coordinate so points on
  // shared edges resolve deterministically.
  constexpr double tol = 1e-12;
  std::size_t best = mesh.num_triangles();
  double best_min = -std::numeric_limits<double>::infinity();
  std::array<double, 3> best_bary{};
  for (std::size_t k = 0; k < mesh.num_triangles(); ++k) {
    const auto g = cell_geometry(mesh, k);
    std::array<double, 3> l{};
    for (int i = 0; i < 3; ++i) {
      const Point2 v = g.vertices[(i + 1) % 3];
      l[i] = dot(g.grad_bary[i], p - v);
    }
    const double lmin = std::min({l[0], l[1], l[2]});
    if (lmin > best_min) {
      best_min = lmin;
      best = k;
      best_bary = l;
    }
  }
  if (best == mesh.num_triangles() || best_min < -tol) {
    throw Error(ErrorCode::point_not_found,
                "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") is outside the mesh");
  }
  return {best, best_bary};
}

namespace {

double eval_at(const FeSpace& space, std::span<const double> coeffs, std::size_t cell,
               const std::array<double, 3>& bary) {
  const auto g = cell_geometry(space.mesh(), cell);
  std::array<double, 6> values{};
  std::array<Vec2, 6> grads{};
  eval_basis(space.degree(), bary, g.grad_bary, values, grads);
  const auto dofs = space.cell_dofs(cell);
  double s = 0.0;
  for (int i = 0; i < space.local_dofs(); ++i) s += values[i] * coeffs[dofs[i]];
  return s;
}

}  // namespace

double evaluate(const ScalarField& field, Point2 p) {
  const auto [cell, bary] = locate(field.space().mesh(), p);
  return eval_at(field.space(), field.values(), cell, bary);
}

Vec2 evaluate(const VectorField& field, Point2 p) {
  const auto [cell, bary] = locate(field.space().mesh(), p);
  return {eval_at(field.space(), field.x(), cell, bary), eval_at(field.space(), field.y(), cell, bary)};
}

}  // namespace acflow
