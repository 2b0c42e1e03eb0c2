#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "acflow/error.hpp"
#include "acflow/mms.hpp"
#include "json.hpp"

namespace acflow::driver {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::config_error, path + ": " + message);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) fail(path, "must be positive");
  return v;
}

double nonnegative(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (v < 0.0) fail(path, "must be nonnegative");
  return v;
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

std::vector<double> positive_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(positive(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& prefix) {
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) fail(prefix + key, "unknown field");
  }
}

TauRule parse_tau(const json& j) {
  if (!j.is_object()) fail("tau", "expected an object with \"divisor\" or \"values\"");
  reject_unknown(j, {"divisor", "values"}, "tau.");
  TauRule rule;
  if (j.contains("divisor") == j.contains("values")) fail("tau", "give exactly one of \"divisor\" and \"values\"");
  if (j.contains("divisor")) rule.divisor = positive(j["divisor"], "tau.divisor");
  if (j.contains("values")) rule.values = positive_list(j["values"], "tau.values");
  return rule;
}

}  // namespace

double TauRule::tau_for(std::size_t level, double h) const {
  if (divisor) return h / *divisor;
  if (level >= values.size()) throw Error(ErrorCode::config_error, "tau.values: no entry for level " + std::to_string(level));
  return values[level];
}

double RunConfig::final_time_for_case() const { return final_time ? *final_time : find_case(case_name).final_time; }

int RunConfig::steps_for(std::size_t level) const {
  const double tau_k = tau.tau_for(level, h.at(level));
  return static_cast<int>(std::lround(final_time_for_case() / tau_k));
}

IntegratorOptions RunConfig::integrator_options(std::size_t level) const {
  const ManufacturedCase& c = find_case(case_name);
  IntegratorOptions o;
  o.variant = variant;
  o.tau = tau.tau_for(level, h.at(level));
  o.lambda_user = lambda_user;
  o.levelset.c_visc = c_visc;
  o.levelset.c_comp = c_comp;
  o.phi_bc = phi_bc ? *phi_bc : c.phi_bc;
  o.grad_div = grad_div;
  o.unit_strain_factor = unit_strain_factor;
  return o;
}

RunConfig parse_config(const std::string& source) {
  json j;
  try {
    j = json::parse(source, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::config_error, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("(root)", "expected an object");
  reject_unknown(j,
                 {"case", "variant", "h", "tau", "final_time", "lambda", "c_visc", "c_comp", "phi_bc", "grad_div",
                  "unit_strain_factor", "output_dir", "seed", "plot", "record_every"},
                 "");

  RunConfig c;
  if (!j.contains("case")) fail("case", "required");
  c.case_name = text(j["case"], "case");
  if (j.contains("variant")) {
    const std::string v = text(j["variant"], "variant");
    if (v == "semi_implicit") {
      c.variant = SchemeVariant::semi_implicit;
    } else if (v == "explicit") {
      c.variant = SchemeVariant::explicit_transport;
    } else {
      fail("variant", "expected \"semi_implicit\" or \"explicit\", got \"" + v + "\"");
    }
  }
  if (j.contains("h")) {
    if (j["h"].is_number()) {
      c.h = {positive(j["h"], "h")};
    } else {
      c.h = positive_list(j["h"], "h");
    }
  }
  if (!j.contains("tau")) fail("tau", "required");
  c.tau = parse_tau(j["tau"]);
  if (j.contains("final_time")) c.final_time = positive(j["final_time"], "final_time");
  if (j.contains("lambda")) c.lambda_user = positive(j["lambda"], "lambda");
  if (j.contains("c_visc")) c.c_visc = nonnegative(j["c_visc"], "c_visc");
  if (j.contains("c_comp")) c.c_comp = nonnegative(j["c_comp"], "c_comp");
  if (j.contains("phi_bc")) {
    const std::string v = text(j["phi_bc"], "phi_bc");
    if (v == "dirichlet_exact") {
      c.phi_bc = LevelSetBc::dirichlet_exact;
    } else if (v == "natural") {
      c.phi_bc = LevelSetBc::natural;
    } else {
      fail("phi_bc", "expected \"dirichlet_exact\" or \"natural\", got \"" + v + "\"");
    }
  }
  if (j.contains("grad_div")) {
    const std::string v = text(j["grad_div"], "grad_div");
    if (v == "lambda_bar") {
      c.grad_div = GradDivCoefficient::lambda_bar;
    } else if (v == "lambda_eff") {
      c.grad_div = GradDivCoefficient::lambda_eff;
    } else {
      fail("grad_div", "expected \"lambda_bar\" or \"lambda_eff\", got \"" + v + "\"");
    }
  }
  if (j.contains("unit_strain_factor")) c.unit_strain_factor = boolean(j["unit_strain_factor"], "unit_strain_factor");
  if (j.contains("output_dir")) c.output_dir = text(j["output_dir"], "output_dir");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("seed", "expected a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("plot")) c.plot = boolean(j["plot"], "plot");
  if (j.contains("record_every")) {
    if (!j["record_every"].is_number_integer() || j["record_every"].get<int>() < 1) {
      fail("record_every", "expected a positive integer");
    }
    c.record_every = j["record_every"].get<int>();
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config_error, "cannot read config file " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

void validate(const RunConfig& c) {
  try {
    (void)find_case(c.case_name);
  } catch (const Error& e) {
    fail("case", e.what());
  }
  if (c.h.empty()) fail("h", "no mesh sizes given");
  for (std::size_t k = 1; k < c.h.size(); ++k) {
    if (!(c.h[k] < c.h[k - 1])) fail("h[" + std::to_string(k) + "]", "mesh sizes must be strictly decreasing");
  }
  if (!c.tau.divisor && c.tau.values.size() != c.h.size()) {
    fail("tau.values", "need one value per mesh level (" + std::to_string(c.h.size()) + ")");
  }
  const double t_final = c.final_time_for_case();
  for (std::size_t k = 0; k < c.h.size(); ++k) {
    const double tau = c.tau.tau_for(k, c.h[k]);
    const std::string where = c.tau.divisor ? "tau.divisor" : "tau.values[" + std::to_string(k) + "]";
    if (tau > t_final) fail(where, "time step exceeds the final time");
    const double steps = t_final / tau;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
      fail(where, "final time " + std::to_string(t_final) + " is not a whole number of steps");
    }
  }
  if (c.variant != SchemeVariant::explicit_transport && c.unit_strain_factor) {
    fail("unit_strain_factor", "only meaningful for the explicit variant");
  }
}

std::vector<double> default_levels(bool full) {
  if (full) return {0.1, 0.05, 0.025, 0.0125, 0.00625};
  return {0.1, 0.05, 0.025};
}

}  // namespace acflow::driver
