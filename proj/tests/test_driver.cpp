#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "acflow/error.hpp"
#include "driver/config.hpp"
#include "driver/runner.hpp"

namespace acflow::driver {
namespace {

namespace fs = std::filesystem;

std::string config_error(const std::string& text) {
  try {
    validate(parse_config(text));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config_error) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("acflow_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(Config, ParsesEveryField) {
  const RunConfig c = parse_config(R"({
    // comments are allowed
    "case": "disk_reciprocal_eta", "variant": "explicit", "h": [0.2, 0.1],
    "tau": {"divisor": 4}, "final_time": 0.5, "lambda": 2, "c_visc": 0.25, "c_comp": 1,
    "phi_bc": "natural", "grad_div": "lambda_eff", "unit_strain_factor": true,
    "output_dir": "x/y", "seed": 9, "plot": false, "record_every": 5
  })");
  validate(c);
  EXPECT_EQ(c.case_name, "disk_reciprocal_eta");
  EXPECT_EQ(c.variant, SchemeVariant::explicit_transport);
  EXPECT_EQ(c.h, (std::vector<double>{0.2, 0.1}));
  EXPECT_DOUBLE_EQ(c.tau.tau_for(1, 0.1), 0.025);
  EXPECT_EQ(c.steps_for(1), 20);
  EXPECT_EQ(c.lambda_user, 2.0);
  EXPECT_EQ(c.phi_bc, LevelSetBc::natural);
  EXPECT_EQ(c.grad_div, GradDivCoefficient::lambda_eff);
  EXPECT_TRUE(c.unit_strain_factor);
  EXPECT_EQ(c.output_dir, fs::path("x/y"));
  EXPECT_EQ(c.seed, 9u);
  EXPECT_FALSE(c.plot);
  EXPECT_EQ(c.record_every, 5);
  const IntegratorOptions o = c.integrator_options(0);
  EXPECT_DOUBLE_EQ(o.tau, 0.05);
  EXPECT_EQ(o.levelset.c_comp, 1.0);
  EXPECT_EQ(o.levelset.c_visc, 0.25);
}

TEST(Config, DefaultsComeFromTheCase) {
  const RunConfig c = parse_config(R"({"case": "quiescent", "h": 0.1, "tau": {"divisor": 2}})");
  EXPECT_DOUBLE_EQ(c.final_time_for_case(), 0.5);
  EXPECT_EQ(c.steps_for(0), 10);
  EXPECT_EQ(c.c_visc, 0.125);
  EXPECT_EQ(c.c_comp, 0.0);
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_NE(config_error(R"({"case": "quiescent", "h": 0.1, "tau": {"divisor": "two"}})").find("tau.divisor"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"case": "quiescent", "h": 0.1, "tau": {"divisor": 2}, "typo": 1})").find("typo"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"case": "nope", "h": 0.1, "tau": {"divisor": 2}})").find("case"), std::string::npos);
  EXPECT_NE(config_error(R"({"case": "quiescent", "h": [0.05, 0.1], "tau": {"divisor": 2}})").find("h"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"case": "quiescent", "h": [0.1, 0.05], "tau": {"values": [0.1]}})").find("tau"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"case": "quiescent", "h": 0.1, "tau": {"values": [0.3]}})").find("tau"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"case": "quiescent", "h": 0.1, "tau": {"values": [0.4]}, "final_time": 0.3})")
                .find("tau"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"case": "quiescent", "h": 0.1, "tau": {"divisor": 2}, "unit_strain_factor": true})")
                .find("unit_strain_factor"),
            std::string::npos);
  EXPECT_NE(config_error(R"({"case": "quiescent", "h": 0.1, "tau": {"divisor": 2}, "variant": "implicit"})")
                .find("variant"),
            std::string::npos);
  config_error("{ not json");
  EXPECT_THROW(load_config("/nonexistent/config.json"), Error);
}

TEST(Config, ShippedConfigsAreValid) {
  for (const auto& entry : fs::directory_iterator(ACFLOW_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(validate(load_config(entry.path()))) << entry.path();
  }
}

TEST(Runner, QuiescentErrorsStayAtSolverTolerance) {
  RunConfig c = parse_config(R"({"case": "quiescent", "h": 0.1, "tau": {"values": [0.05]}})");
  std::ostringstream ts;
  const LevelResult r = run_level(c, 0, &ts);
  EXPECT_EQ(r.steps, 10);
  EXPECT_LE(r.final.err_u.value, 1e-10);
  EXPECT_LE(r.final.err_p.value, 1e-10);
  EXPECT_LE(r.final.err_rho.value, 1e-10);
  EXPECT_LE(r.final.err_phi.value, 1e-10);
  std::istringstream lines(ts.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, kTimeseriesHeader);
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 11);  // steps 0 through 10
}

TEST(Runner, TestOneCoarseLevelMagnitude) {
  const RunConfig c =
      parse_config(R"({"case": "disk_linear_eta_10", "h": 0.1, "tau": {"values": [0.05]}, "final_time": 1})");
  const LevelResult r = run_level(c, 0, nullptr);
  EXPECT_EQ(r.steps, 20);
  EXPECT_GE(r.final.err_u.value, 3.49e-2 / 3.0);
  EXPECT_LE(r.final.err_u.value, 3.49e-2 * 3.0);
}

TEST(Runner, RerunsAreBitwiseIdentical) {
  RunConfig c = parse_config(
      R"({"case": "disk_linear_eta_10", "h": 0.2, "tau": {"values": [0.1]}, "final_time": 0.5, "seed": 4})");
  c.output_dir = scratch("rerun_a");
  run_single(c);
  const fs::path a = c.output_dir;
  c.output_dir = scratch("rerun_b");
  run_single(c);
  for (const char* f : {"timeseries.csv", "summary.csv"}) {
    const std::string first = slurp(a / f);
    EXPECT_FALSE(first.empty());
    EXPECT_EQ(first, slurp(c.output_dir / f)) << f;
  }
  EXPECT_EQ(slurp(a / "timeseries.csv").substr(0, std::string(kTimeseriesHeader).size()), kTimeseriesHeader);
  EXPECT_EQ(slurp(a / "summary.csv").substr(0, std::string(kSummaryHeader).size()), kSummaryHeader);
}

TEST(Runner, ConvergenceWritesEveryArtifact) {
  RunConfig c = parse_config(
      R"({"case": "disk_linear_eta_10", "h": [0.2, 0.1], "tau": {"divisor": 2}, "final_time": 0.2})");
  c.output_dir = scratch("converge");
  const auto levels = run_convergence(c);
  ASSERT_EQ(levels.size(), 2u);
  EXPECT_LT(levels[1].final.err_u.value, levels[0].final.err_u.value);
  for (const char* f : {"convergence.csv", "convergence.svg", "level_0/summary.csv", "level_1/timeseries.csv"}) {
    EXPECT_TRUE(fs::exists(c.output_dir / f)) << f;
  }
  const std::string csv = slurp(c.output_dir / "convergence.csv");
  EXPECT_EQ(csv.substr(0, std::string(kConvergenceHeader).size()), kConvergenceHeader);
  EXPECT_NE(slurp(c.output_dir / "convergence.svg").find("<svg"), std::string::npos);
}

TEST(Runner, ConvergenceNeedsTwoLevels) {
  const RunConfig c = parse_config(R"({"case": "quiescent", "h": [0.1], "tau": {"divisor": 2}})");
  try {
    run_convergence(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_parameter);
  }
}

TEST(Runner, DefaultLevels) {
  EXPECT_EQ(default_levels(false), (std::vector<double>{0.1, 0.05, 0.025}));
  EXPECT_EQ(default_levels(true).back(), 0.00625);
}

}  // namespace
}  // namespace acflow::driver
