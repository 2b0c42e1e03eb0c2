#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "acflow/error.hpp"
#include "acflow/mesh.hpp"

namespace acflow {
namespace {

constexpr double kPi = std::numbers::pi;

void expect_code(ErrorCode code, const auto& fn) {
  try {
    fn();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(Mesh, UnitSquareAtUnitSizeIsTwoTriangles) {
  const Mesh m = generate_mesh(RectangleShape{0, 1, 0, 1}, 1.0);
  EXPECT_EQ(m.num_triangles(), 2u);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-15);
  EXPECT_EQ(m.boundary_edges().size(), 4u);
}

TEST(Mesh, RejectsNonpositiveTarget) {
  expect_code(ErrorCode::invalid_parameter, [] { generate_mesh(DiskShape{1.0}, 0.0); });
  expect_code(ErrorCode::invalid_parameter, [] { generate_mesh(RectangleShape{0, 1, 0, 1}, -0.1); });
}

TEST(Mesh, DegenerateGeometryFails) {
  expect_code(ErrorCode::generation_failed, [] { generate_mesh(RectangleShape{0, 0, 0, 1}, 0.1); });
  expect_code(ErrorCode::generation_failed, [] { generate_mesh(DiskShape{0.0}, 0.1); });
}

// Calibrated once: the polygonal deficit pi - area is about 0.42 h^2 for
// boundary node spacing 0.9 h.
TEST(Mesh, DiskAreaDeficitIsSecondOrder) {
  const double d1 = kPi - generate_mesh(DiskShape{1.0}, 0.1).total_area();
  const double d2 = kPi - generate_mesh(DiskShape{1.0}, 0.05).total_area();
  EXPECT_GT(d1, 0.0);
  EXPECT_LE(d1, 0.5 * 0.1 * 0.1);
  EXPECT_NEAR(d1 / d2, 4.0, 0.2);
}

TEST(Mesh, GeneratedMeshInvariants) {
  for (const DomainShape shape : {DomainShape{DiskShape{1.0}}, DomainShape{DiskShape{2.5}},
                                  DomainShape{RectangleShape{0, 1, -1, 1}}}) {
    for (double h : {0.2, 0.1, 0.05, 0.033}) {
      const Mesh m = generate_mesh(shape, h);
      EXPECT_LE(m.h_global(), 1.5 * h);
      double area = 0.0;
      for (std::size_t k = 0; k < m.num_triangles(); ++k) {
        EXPECT_GT(m.signed_area(k), 0.0);
        area += m.signed_area(k);
        const auto& t = m.triangles()[k];
        double longest = 0.0;
        for (int i = 0; i < 3; ++i) {
          const Point2 a = m.vertices()[t[i]], b = m.vertices()[t[(i + 1) % 3]];
          longest = std::max(longest, std::hypot(a.x - b.x, a.y - b.y));
        }
        EXPECT_DOUBLE_EQ(m.h_local(k), longest);
      }
      EXPECT_NEAR(area, m.total_area(), 1e-12 * area);
      if (const auto* d = std::get_if<DiskShape>(&shape)) {
        for (const auto& be : m.boundary_edges()) {
          for (int v : {be.a, be.b}) {
            const Point2 p = m.vertices()[v];
            EXPECT_NEAR(std::hypot(p.x, p.y), d->radius, 1e-12 * d->radius);
          }
        }
      } else {
        EXPECT_NEAR(area, 2.0, 1e-12);
      }
      // every edge is used once (boundary) or twice (interior)
      std::vector<int> use(m.num_edges(), 0);
      for (std::size_t k = 0; k < m.num_triangles(); ++k) {
        for (int e : m.triangle_edges(k)) ++use[e];
      }
      std::size_t boundary = 0;
      for (std::size_t e = 0; e < m.num_edges(); ++e) {
        ASSERT_TRUE(use[e] == 1 || use[e] == 2);
        if (use[e] == 1) {
          ++boundary;
          EXPECT_NE(m.edge_tags()[e], 0);
        }
      }
      EXPECT_EQ(boundary, m.boundary_edges().size());
    }
  }
}

TEST(Mesh, HalvingTargetHalvesGlobalSize) {
  for (double h : {0.2, 0.1, 0.05}) {
    const double coarse = generate_mesh(DiskShape{1.0}, h).h_global();
    const double fine = generate_mesh(DiskShape{1.0}, h / 2).h_global();
    EXPECT_LE(fine, 1.5 * coarse / 2) << h;
  }
}

TEST(Mesh, DeterministicPerSeed) {
  EXPECT_EQ(generate_mesh(DiskShape{1.0}, 0.1, 7), generate_mesh(DiskShape{1.0}, 0.1, 7));
  EXPECT_FALSE(generate_mesh(DiskShape{1.0}, 0.1, 7) == generate_mesh(DiskShape{1.0}, 0.1, 8));
  EXPECT_EQ(generate_mesh(DiskShape{1.0}, 0.1), generate_mesh(DiskShape{1.0}, 0.1));
}

TEST(Mesh, RefineUniformProjectsBoundaryMidpoints) {
  const Mesh coarse = generate_mesh(DiskShape{1.0}, 0.2);
  const Mesh fine = refine_uniform(coarse, DiskShape{1.0});
  EXPECT_EQ(fine.num_triangles(), 4 * coarse.num_triangles());
  for (const auto& be : fine.boundary_edges()) {
    const Point2 p = fine.vertices()[be.a];
    EXPECT_NEAR(std::hypot(p.x, p.y), 1.0, 1e-12);
  }
  EXPECT_GT(fine.total_area(), coarse.total_area());
}

TEST(Mesh, SaveLoadRoundTrip) {
  for (const Mesh& m : {generate_mesh(RectangleShape{0, 1, 0, 1}, 1.0), generate_mesh(DiskShape{1.0}, 0.2, 3)}) {
    std::stringstream s;
    write_mesh(m, s);
    EXPECT_EQ(read_mesh(s), m);
  }
}

TEST(Mesh, ParseErrorsCarryLineNumbers) {
  std::istringstream bad("ACMESH 1\nVERTICES 2\n0 0\nnot-a-number 1\n");
  try {
    read_mesh(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse_error);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  std::istringstream header("MESH 2\n");
  expect_code(ErrorCode::parse_error, [&] { read_mesh(header); });
}

TEST(Mesh, InconsistentFilesAreValidationErrors) {
  const std::string head = "ACMESH 1\n# unit square\nVERTICES 4\n0 0\n1 0\n1 1\n0 1\n";
  std::istringstream missing_vertex(head + "TRIANGLES 2\n0 1 2\n0 2 7\nBOUNDARY 0\n");
  expect_code(ErrorCode::validation_error, [&] { read_mesh(missing_vertex); });
  std::istringstream duplicated(head + "TRIANGLES 2\n0 1 2\n0 2 3\nBOUNDARY 5\n0 1 1\n1 2 1\n2 3 1\n3 0 1\n0 1 1\n");
  expect_code(ErrorCode::validation_error, [&] { read_mesh(duplicated); });
  std::istringstream fine(head + "TRIANGLES 2\n0 1 2\n0 2 3\nBOUNDARY 4\n0 1 1\n1 2 2\n2 3 3\n3 0 4\n");
  EXPECT_EQ(read_mesh(fine).num_triangles(), 2u);
}

}  // namespace
}  // namespace acflow
