#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "acflow/diagnostics.hpp"
#include "acflow/error.hpp"
#include "acflow/levelset.hpp"
#include "acflow/mms.hpp"

namespace acflow {
namespace {

struct Setup {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const FeSpace> p2;
};

Setup disk(double h) {
  auto m = std::make_shared<const Mesh>(generate_mesh(DiskShape{1.0}, h));
  return {m, std::make_shared<const FeSpace>(m, 2)};
}

double integral(const ScalarField& f) {
  const SparseMatrix m = assemble_form(f.space_ptr(), form::Mass{});
  const auto mf = m * f.values();
  return std::accumulate(mf.begin(), mf.end(), 0.0);
}

double max_diff(const ScalarField& a, const ScalarField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

const VectorFunction kRotation = [](Point2 x, double) { return Vec2{-x.y, x.x}; };

TEST(MaterialLaw, Examples) {
  const MaterialLaw lin = MaterialLaw::linear(1, 100, 1, 10);
  EXPECT_EQ(lin.density(0.0), 1.0);
  EXPECT_EQ(lin.density(1.0), 100.0);
  EXPECT_DOUBLE_EQ(lin.density(0.5), 50.5);
  EXPECT_DOUBLE_EQ(lin.viscosity(50.5), 5.5);
  const MaterialLaw rec = MaterialLaw::reciprocal(1, 100);
  EXPECT_DOUBLE_EQ(rec.viscosity(rec.density(1.0)), 0.01);
}

TEST(MaterialLaw, ReconstructionExamples) {
  const auto s = disk(0.2);
  const auto run = [&](double phi, const MaterialLaw& law, double rho, double eta) {
    const auto [r, e] = reconstruct_materials(interpolate(s.p2, [phi](Point2, double) { return phi; }), law);
    for (std::size_t i = 0; i < r.size(); ++i) {
      EXPECT_DOUBLE_EQ(r[i], rho);
      EXPECT_DOUBLE_EQ(e[i], eta);
    }
  };
  run(0.0, MaterialLaw::linear(1, 100, 1, 10), 1.0, 1.0);
  run(0.5, MaterialLaw::linear(1, 100, 1, 10), 50.5, 5.5);
  run(1.0, MaterialLaw::reciprocal(1, 100), 100.0, 0.01);
}

TEST(MaterialLaw, RejectsBadBounds) {
  EXPECT_THROW(MaterialLaw::linear(0.0, 1.0, 1, 1), Error);
  EXPECT_THROW(MaterialLaw::linear(2.0, 1.0, 1, 1), Error);
  try {
    MaterialLaw::reciprocal(1, 100).viscosity(-1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::material_law_error);
  }
}

TEST(LevelSetParams, Validation) {
  EXPECT_NO_THROW(LevelSetParams{}.validate());
  EXPECT_THROW((LevelSetParams{-1.0, 0.0, 1e-12}.validate()), Error);
  EXPECT_THROW((LevelSetParams{0.1, -1.0, 1e-12}.validate()), Error);
  EXPECT_THROW((LevelSetParams{0.1, 0.0, 0.0}.validate()), Error);
}

class BothVariants : public ::testing::TestWithParam<SchemeVariant> {};

TEST_P(BothVariants, ConstantsAreSteady) {
  const auto s = disk(0.1);
  const VectorField zero(s.p2);
  const ScalarFunction c = [](Point2, double) { return 0.3; };
  for (LevelSetBc bc : {LevelSetBc::natural, LevelSetBc::dirichlet_exact}) {
    LevelSetStepper st(s.p2, 0.05, {}, bc, GetParam());
    const ScalarField phi0 = interpolate(s.p2, c);
    const ScalarField phi1 = st.step(phi0, zero, 0.05, nullptr, &c);
    EXPECT_LE(max_diff(phi0, phi1), 1e-10);
  }
}

TEST_P(BothVariants, NaturalDiffusionConservesIntegral) {
  const auto s = disk(0.1);
  const VectorField zero(s.p2);
  LevelSetStepper st(s.p2, 0.05, {}, LevelSetBc::natural, GetParam());
  ScalarField phi = interpolate(s.p2, [](Point2 x, double) { return x.x; });
  const double before = integral(interpolate(s.p2, [](Point2 x, double) { return x.x + 1.0; }));
  ScalarField shifted = interpolate(s.p2, [](Point2 x, double) { return x.x + 1.0; });
  for (int k = 1; k <= 5; ++k) {
    shifted = st.step(shifted, zero, 0.05 * k, nullptr, nullptr);
    phi = st.step(phi, zero, 0.05 * k, nullptr, nullptr);
  }
  EXPECT_NEAR(integral(shifted), before, 1e-10 * before);
  EXPECT_NEAR(integral(phi), 0.0, 1e-10);
  // the field did diffuse
  EXPECT_GT(max_diff(phi, interpolate(s.p2, [](Point2 x, double) { return x.x; })), 1e-4);
}

TEST_P(BothVariants, AffineWithoutCompression) {
  const auto s = disk(0.1);
  const VectorField u = interpolate(s.p2, kRotation);
  LevelSetStepper st(s.p2, 0.02, {0.125, 0.0, 1e-12}, LevelSetBc::natural, GetParam());
  const ScalarField a = interpolate(s.p2, [](Point2 x, double) { return std::sin(3 * x.x) * x.y; });
  const ScalarField b = interpolate(s.p2, [](Point2 x, double) { return x.x * x.x - 0.2; });
  ScalarField sum = a;
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = 2.0 * a[i] - 3.0 * b[i];
  const ScalarField sa = st.step(a, u, 0.02, nullptr, nullptr);
  const ScalarField sb = st.step(b, u, 0.02, nullptr, nullptr);
  const ScalarField ss = st.step(sum, u, 0.02, nullptr, nullptr);
  double d = 0.0;
  for (std::size_t i = 0; i < ss.size(); ++i) d = std::max(d, std::abs(ss[i] - 2.0 * sa[i] + 3.0 * sb[i]));
  EXPECT_LE(d, 1e-9);
  // with a source, the step is affine in f_phi too
  const ScalarFunction f = [](Point2 x, double) { return 1.0 + x.y; };
  const ScalarFunction f2 = [](Point2 x, double) { return 2.0 * (1.0 + x.y); };
  const ScalarField with1 = st.step(a, u, 0.02, &f, nullptr);
  const ScalarField with2 = st.step(a, u, 0.02, &f2, nullptr);
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(with2[i] - 2.0 * with1[i] + sa[i]));
  EXPECT_LE(d, 1e-9);
}

TEST_P(BothVariants, InputChecks) {
  const auto s = disk(0.2);
  LevelSetStepper st(s.p2, 0.05, {}, LevelSetBc::dirichlet_exact, GetParam());
  const VectorField zero(s.p2);
  ScalarField phi(s.p2);
  EXPECT_THROW(st.step(phi, zero, 0.05, nullptr, nullptr), Error);  // boundary data missing
  phi[0] = std::nan("");
  const ScalarFunction c = [](Point2, double) { return 0.0; };
  try {
    st.step(phi, zero, 0.05, nullptr, &c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_state);
  }
  const auto other = disk(0.15);
  try {
    st.step(ScalarField(other.p2), zero, 0.05, nullptr, &c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::space_mismatch);
  }
  EXPECT_THROW(LevelSetStepper(s.p2, 0.0, {}, LevelSetBc::natural, GetParam()), Error);
}

INSTANTIATE_TEST_SUITE_P(LevelSet, BothVariants,
                         ::testing::Values(SchemeVariant::semi_implicit, SchemeVariant::explicit_transport),
                         [](const auto& info) {
                           return info.param == SchemeVariant::semi_implicit ? "semi_implicit" : "explicit";
                         });

TEST(LevelSet, CompressionOffIsSkipped) {
  const auto s = disk(0.1);
  const ScalarField phi = interpolate(s.p2, [](Point2 x, double) { return x.x < 0.1 ? 1.0 : 0.0; });
  LevelSetStepper off(s.p2, 0.02, {0.125, 0.0, 1e-12}, LevelSetBc::natural, SchemeVariant::explicit_transport);
  for (double v : off.compression_load(phi)) EXPECT_EQ(v, 0.0);
  LevelSetStepper on(s.p2, 0.02, {0.125, 1.0, 1e-12}, LevelSetBc::natural, SchemeVariant::explicit_transport);
  EXPECT_GT(norm2(on.compression_load(phi)), 0.0);
  // constant regions carry no flux beyond roundoff: phi (1 - phi) = 0 at 0 and 1
  for (double v : on.compression_load(interpolate(s.p2, [](Point2, double) { return 1.0; }))) EXPECT_NEAR(v, 0.0, 1e-15);
  const VectorField u = interpolate(s.p2, kRotation);
  const ScalarField a = off.step(phi, u, 0.02, nullptr, nullptr);
  const ScalarField b = off.step(phi, u, 0.02, nullptr, nullptr);
  EXPECT_EQ(max_diff(a, b), 0.0);
}

TEST(LevelSet, ExplicitOperatorIsConstantAndFactoredOnce) {
  const auto s = disk(0.1);
  LevelSetStepper st(s.p2, 0.02, {0.125, 1.0, 1e-12}, LevelSetBc::natural, SchemeVariant::explicit_transport);
  const VectorField u = interpolate(s.p2, kRotation);
  ScalarField phi = interpolate(s.p2, [](Point2 x, double) { return std::hypot(x.x - 0.5, x.y) < 0.25 ? 1.0 : 0.0; });
  const SparseMatrix at_start = st.assemble_implicit_operator();
  for (int k = 1; k <= 100; ++k) phi = st.step(phi, u, 0.02 * k, nullptr, nullptr);
  EXPECT_EQ(st.factorizations(), 1);
  EXPECT_EQ(st.assemble_implicit_operator(), at_start);
  EXPECT_EQ(st.implicit_operator(), at_start);
}

// Both variants are first-order consistent, so one step from the same data
// differs by O(tau^2).
TEST(LevelSet, VariantsAgreeToSecondOrderPerStep) {
  const ManufacturedCase& c = find_case("disk_linear_eta_10");
  const auto s = disk(0.1);
  const FlowForcing forcing = case_forcing(c);
  std::vector<double> diffs;
  for (double tau : {0.005, 0.0025, 0.00125}) {
    const ScalarField phi = interpolate(s.p2, c.phi, 0.0);
    const VectorField u = interpolate(s.p2, c.u, 0.0);
    LevelSetStepper semi(s.p2, tau, {}, LevelSetBc::dirichlet_exact, SchemeVariant::semi_implicit);
    LevelSetStepper expl(s.p2, tau, {}, LevelSetBc::dirichlet_exact, SchemeVariant::explicit_transport);
    const ScalarField a = semi.step(phi, u, tau, &forcing.levelset_source, &forcing.levelset_boundary);
    const ScalarField b = expl.step(phi, u, tau, &forcing.levelset_source, &forcing.levelset_boundary);
    diffs.push_back(max_diff(a, b));
  }
  EXPECT_GT(diffs[0] / diffs[1], 3.0);
  EXPECT_GT(diffs[1] / diffs[2], 3.0);
}

TEST(LevelSet, Overshoot) {
  const auto s = disk(0.2);
  ScalarField phi = interpolate(s.p2, [](Point2 x, double) { return 0.5 + 0.5 * x.x; });
  EXPECT_EQ(overshoot(phi), 0.0);
  phi[3] = 1.03;
  EXPECT_NEAR(overshoot(phi), 0.03, 1e-15);
  phi[5] = -0.01;
  EXPECT_NEAR(overshoot(phi), 0.04, 1e-15);
}

}  // namespace
}  // namespace acflow
