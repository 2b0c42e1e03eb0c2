// acflow: run, converge, mesh, validate-mms.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "acflow/error.hpp"
#include "acflow/mesh.hpp"
#include "acflow/mms.hpp"
#include "driver/config.hpp"
#include "driver/runner.hpp"

namespace {

using namespace acflow;

constexpr int kConfigFailure = 2;
constexpr int kNumericalFailure = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::config_error:
    case ErrorCode::invalid_parameter:
    case ErrorCode::parse_error:
      return kConfigFailure;
    default:
      return kNumericalFailure;
  }
}

void print_level(const driver::LevelResult& r) {
  std::printf("level %zu  h=%g  h_global=%.4g  tau=%g  steps=%d  err_u=%.3e  err_p=%.3e  err_rho=%.3e  err_phi=%.3e  (%.1fs)\n",
              r.level, r.h, r.h_global, r.tau, r.steps, r.final.err_u.value, r.final.err_p.value,
              r.final.err_rho.value, r.final.err_phi.value, r.wall_seconds);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Artificial compressibility solver for variable-density incompressible flow"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Single simulation; writes timeseries.csv and summary.csv");
  run->add_option("--config", config_path, "JSON run configuration")->required();
  std::string out_override;
  run->add_option("--out", out_override, "Override the output directory");

  auto* converge = app.add_subcommand("converge", "Convergence study over the configured mesh levels");
  converge->add_option("--config", config_path, "JSON run configuration")->required();
  converge->add_option("--out", out_override, "Override the output directory");
  bool full = false;
  converge->add_flag("--full", full, "Default levels down to h = 0.00625 when the config gives none (hours)");

  auto* mesh_cmd = app.add_subcommand("mesh", "Generate a mesh file");
  std::string shape = "disk";
  double h = 0.1, radius = 1.0;
  std::vector<double> box{0.0, 1.0, 0.0, 1.0};
  std::uint64_t seed = 0;
  std::string mesh_out;
  mesh_cmd->set_help_flag("--help", "Print this help message and exit");
  mesh_cmd->add_option("--shape", shape, "disk or rectangle")->check(CLI::IsMember({"disk", "rectangle"}));
  mesh_cmd->add_option("--h", h, "Target mesh size")->required();
  mesh_cmd->add_option("--radius", radius, "Disk radius");
  mesh_cmd->add_option("--box", box, "Rectangle x0 x1 y0 y1")->expected(4);
  mesh_cmd->add_option("--seed", seed, "Jitter seed (0 = none)");
  mesh_cmd->add_option("--out", mesh_out, "Output mesh file")->required();

  auto* validate_cmd = app.add_subcommand("validate-mms", "Finite-difference oracle gate for a manufactured case");
  std::string case_name;
  int samples = 1000;
  unsigned oracle_seed = 42;
  double tol = 1e-6;
  validate_cmd->add_option("--case", case_name, "Case name")->required();
  validate_cmd->add_option("--samples", samples, "Number of sample points");
  validate_cmd->add_option("--seed", oracle_seed, "Sampling seed");
  validate_cmd->add_option("--tol", tol, "Maximum relative deviation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }

  try {
    if (*run || *converge) {
      driver::RunConfig config = driver::load_config(config_path);
      if (!out_override.empty()) config.output_dir = out_override;
      if (*run) {
        if (config.h.empty()) throw Error(ErrorCode::config_error, "h: required for run");
        const auto r = driver::run_single(config);
        print_level(r);
        std::printf("wrote %s\n", config.output_dir.string().c_str());
      } else {
        if (config.h.empty()) config.h = driver::default_levels(full);
        driver::run_convergence(config, print_level);
        std::printf("wrote %s\n", (config.output_dir / "convergence.csv").string().c_str());
      }
    } else if (*mesh_cmd) {
      const DomainShape domain =
          shape == "disk" ? DomainShape{DiskShape{radius}} : DomainShape{RectangleShape{box[0], box[1], box[2], box[3]}};
      const Mesh m = generate_mesh(domain, h, seed);
      save_mesh(m, mesh_out);
      std::printf("%zu vertices, %zu triangles, h_global %.6g, area %.12g\n", m.num_vertices(), m.num_triangles(),
                  m.h_global(), m.total_area());
    } else if (*validate_cmd) {
      const ManufacturedCase& c = find_case(case_name);
      const OracleReport r = validate_case(c, samples, oracle_seed);
      std::printf("%s: %d points, momentum %.3e, level set %.3e, derivatives %.3e (tolerance %.1e)\n",
                  r.case_name.c_str(), r.samples, r.momentum_deviation, r.levelset_deviation, r.derivative_deviation,
                  tol);
      if (!r.passed(tol)) {
        std::printf("FAILED, worst point (%.6f, %.6f)\n", r.worst_point.x, r.worst_point.y);
        return kNumericalFailure;
      }
      std::printf("passed\n");
    }
  } catch (const Error& e) {
    std::cerr << "acflow: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "acflow: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return 0;
}
