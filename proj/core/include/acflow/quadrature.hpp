#pragma once

#include <array>

namespace acflow {

struct QuadraturePoint {
  std::array<double, 3> bary;  // barycentric coordinates
  double weight;               // fraction of the element area
};

/// Seven-point rule on triangles, exact for polynomials of total degree <= 5.
/// The single rule used by every form, right-hand side and norm.
const std::array<QuadraturePoint, 7>& triangle_rule();

}  // namespace acflow
