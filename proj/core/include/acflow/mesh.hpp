#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <variant>
#include <vector>

namespace acflow {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }

using Triangle = std::array<int, 3>;

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  int tag = 0;
};

struct DiskShape {
  double radius = 1.0;
};

struct RectangleShape {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;
};

using DomainShape = std::variant<DiskShape, RectangleShape>;

// Boundary tags used by the generators.
inline constexpr int kDiskBoundaryTag = 1;
inline constexpr int kRectBottomTag = 1;
inline constexpr int kRectRightTag = 2;
inline constexpr int kRectTopTag = 3;
inline constexpr int kRectLeftTag = 4;

/// Conforming triangulation with boundary tagging and per-cell diameters.
///
/// Immutable after construction. Construction validates connectivity: every
/// triangle has positive signed area (clockwise input is reoriented), every
/// edge touches one or two triangles, and the boundary edge list is exactly the
/// set of edges owned by a single triangle.
class Mesh {
 public:
  Mesh(std::vector<Point2> vertices, std::vector<Triangle> triangles,
       std::vector<BoundaryEdge> boundary);

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }

  /// Unique undirected edges, each stored with the smaller vertex first.
  const std::vector<std::array<int, 2>>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }

  /// Edge ids of triangle k in local order (v0,v1), (v1,v2), (v2,v0).
  const std::array<int, 3>& triangle_edges(std::size_t k) const { return triangle_edges_[k]; }

  /// Tag of each edge, or 0 for interior edges.
  const std::vector<int>& edge_tags() const { return edge_tags_; }

  double h_local(std::size_t k) const { return h_local_[k]; }
  const std::vector<double>& h_local() const { return h_local_; }
  double h_global() const { return h_global_; }

  double signed_area(std::size_t k) const;
  double total_area() const;

 private:
  std::vector<Point2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<BoundaryEdge> boundary_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<int> edge_tags_;
  std::vector<double> h_local_;
  double h_global_ = 0.0;
};

bool operator==(const Mesh& a, const Mesh& b);

/// Builds a mesh of the given shape with h_global <= 1.5 * h_target.
///
/// Rectangles are split into a structured grid of right triangles. Disks are
/// a hexagonal lattice of spacing h_target plus equally spaced nodes exactly on
/// the circle, triangulated by Delaunay insertion, with the band next to the
/// circle relaxed by Laplacian smoothing; a nonzero seed jitters the lattice
/// reproducibly.
Mesh generate_mesh(const DomainShape& shape, double h_target, std::uint64_t seed = 0);

/// Splits every triangle into four through its edge midpoints. Midpoints of
/// boundary edges of a disk are projected radially onto the circle.
Mesh refine_uniform(const Mesh& mesh, const DomainShape& shape);

void write_mesh(const Mesh& mesh, std::ostream& out);
Mesh read_mesh(std::istream& in);

void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
Mesh load_mesh(const std::filesystem::path& path);

}  // namespace acflow
