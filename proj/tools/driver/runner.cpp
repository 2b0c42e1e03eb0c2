#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "acflow/error.hpp"

namespace acflow::driver {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::config_error, "cannot write " + path.string());
  return out;
}

const char* variant_name(SchemeVariant v) { return v == SchemeVariant::semi_implicit ? "semi_implicit" : "explicit"; }

// Depth of the adaptive split used on cells crossed by a discontinuous exact field.
constexpr int kJumpRefinement = 4;

}  // namespace

ErrorReport measure(const ManufacturedCase& c, const FlowState& s, const SchemeParams& params) {
  const bool smooth = c.smoothness == Smoothness::smooth;
  const int refine = smooth ? 0 : kJumpRefinement;
  ErrorReport r;
  r.step = s.step;
  r.t = s.t;
  r.err_u = relative_error(s.u, c.u, s.t);
  r.err_p = relative_error(s.p, c.p, s.t);
  r.err_rho = relative_error(s.rho, [&c](Point2 x, double t) { return c.rho(x, t); }, s.t, Norm::L2, refine);
  r.err_phi = relative_error(s.phi, c.phi, s.t, smooth ? Norm::L2 : Norm::L1, refine);
  const Monitors m = monitors(s);
  r.div_norm = m.div_norm;
  r.overshoot = m.overshoot;
  r.energy = energy(s, params).total();
  return r;
}

LevelResult run_level(const RunConfig& config, std::size_t level, std::ostream* timeseries) {
  const auto start = std::chrono::steady_clock::now();
  const ManufacturedCase& c = find_case(config.case_name);
  const double h = config.h.at(level);
  auto mesh = std::make_shared<const Mesh>(generate_mesh(c.domain, h, config.seed));
  const IntegratorOptions options = config.integrator_options(level);
  Integrator integrator(mesh, c.law, case_forcing(c), options, case_initial_condition(c));

  LevelResult res;
  res.level = level;
  res.h = h;
  res.h_global = mesh->h_global();
  res.tau = options.tau;
  res.steps = config.steps_for(level);
  res.n_dofs_u = 2 * integrator.velocity_space()->num_dofs();
  res.n_dofs_p = integrator.pressure_space()->num_dofs();

  FlowState state = integrator.initial_state();
  if (timeseries != nullptr) {
    *timeseries << kTimeseriesHeader << '\n';
    write_timeseries_row(*timeseries, measure(c, state, integrator.params()));
  }
  for (int n = 1; n <= res.steps; ++n) {
    state = integrator.advance(state);
    const bool last = n == res.steps;
    if (last) res.final = measure(c, state, integrator.params());
    if (timeseries != nullptr && (last || n % config.record_every == 0)) {
      write_timeseries_row(*timeseries, last ? res.final : measure(c, state, integrator.params()));
    }
  }
  if (res.steps == 0) res.final = measure(c, state, integrator.params());
  res.factorizations = integrator.factorizations();
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

LevelResult run_single(const RunConfig& config) {
  validate(config);
  auto ts = open_output(config.output_dir / "timeseries.csv");
  const LevelResult r = run_level(config, 0, &ts);
  auto summary = open_output(config.output_dir / "summary.csv");
  write_summary(summary, config, r);
  return r;
}

unsigned thread_cap() {
  if (const char* env = std::getenv("ACFLOW_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<LevelResult> run_convergence(const RunConfig& config,
                                         const std::function<void(const LevelResult&)>& on_level) {
  if (config.h.size() < 2) throw Error(ErrorCode::invalid_parameter, "a convergence study needs at least two mesh levels");
  validate(config);
  const std::size_t n = config.h.size();
  std::vector<LevelResult> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::mutex report;

  const auto work = [&](std::size_t k) {
    try {
      const auto dir = config.output_dir / ("level_" + std::to_string(k));
      auto ts = open_output(dir / "timeseries.csv");
      results[k] = run_level(config, k, &ts);
      auto summary = open_output(dir / "summary.csv");
      write_summary(summary, config, results[k]);
      if (on_level) {
        std::lock_guard lock(report);
        on_level(results[k]);
      }
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };

  // Finest levels first so the longest runs start early.
  const unsigned workers = std::min<unsigned>(thread_cap(), static_cast<unsigned>(n));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) work(k);
  } else {
    std::vector<std::thread> pool;
    std::mutex queue;
    std::size_t next = 0;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t k;
          {
            std::lock_guard lock(queue);
            if (next == n) return;
            k = n - 1 - next++;
          }
          work(k);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  auto table = open_output(config.output_dir / "convergence.csv");
  write_convergence(table, results);
  if (config.plot) {
    auto svg = open_output(config.output_dir / "convergence.svg");
    write_convergence_svg(svg, config.case_name, results);
  }
  return results;
}

void write_timeseries_row(std::ostream& out, const ErrorReport& r) {
  out << r.step << ',' << sci(r.t) << ',' << sci(r.err_u.value) << ',' << sci(r.err_p.value) << ','
      << sci(r.err_phi.value) << ',' << sci(r.div_norm) << ',' << sci(r.overshoot) << ',' << sci(r.energy) << '\n';
}

void write_summary(std::ostream& out, const RunConfig& config, const LevelResult& r) {
  const ErrorReport& e = r.final;
  out << kSummaryHeader << '\n';
  out << config.case_name << ',' << variant_name(config.variant) << ',' << sci(r.h) << ',' << sci(r.h_global) << ','
      << sci(r.tau) << ',' << r.steps << ',' << r.n_dofs_u << ',' << r.n_dofs_p << ',' << sci(e.t) << ','
      << sci(e.err_u.value) << ',' << sci(e.err_p.value) << ',' << sci(e.err_rho.value) << ','
      << sci(e.err_phi.value) << ',' << sci(e.div_norm) << ',' << sci(e.overshoot) << ',' << sci(e.energy) << ','
      << r.factorizations << '\n';
}

void write_convergence(std::ostream& out, const std::vector<LevelResult>& levels) {
  out << kConvergenceHeader << '\n';
  const auto rate = [&](std::size_t k, auto pick) -> std::string {
    if (k == 0) return "";
    const double a = pick(levels[k - 1]), b = pick(levels[k]);
    if (!(a > 0.0) || !(b > 0.0)) return "";
    return sci(std::log(a / b) / std::log(levels[k - 1].h / levels[k].h));
  };
  const auto eu = [](const LevelResult& r) { return r.final.err_u.value; };
  const auto ep = [](const LevelResult& r) { return r.final.err_p.value; };
  const auto er = [](const LevelResult& r) { return r.final.err_rho.value; };
  const auto ef = [](const LevelResult& r) { return r.final.err_phi.value; };
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const LevelResult& r = levels[k];
    out << k << ',' << sci(r.h) << ',' << sci(r.h_global) << ',' << sci(r.tau) << ',' << (r.n_dofs_u + r.n_dofs_p)
        << ',' << sci(eu(r)) << ',' << rate(k, eu) << ',' << sci(ep(r)) << ',' << rate(k, ep) << ',' << sci(er(r))
        << ',' << rate(k, er) << ',' << sci(ef(r)) << ',' << rate(k, ef) << '\n';
  }
}

void write_convergence_svg(std::ostream& out, const std::string& title, const std::vector<LevelResult>& levels) {
  constexpr double width = 640, height = 480, left = 80, right = 150, top = 40, bottom = 60;
  struct Series {
    const char* name;
    const char* color;
    std::vector<double> values;
  };
  std::vector<Series> series{{"velocity L2", "#1f77b4", {}},
                             {"pressure L2", "#d62728", {}},
                             {"density L2", "#2ca02c", {}},
                             {"level set", "#9467bd", {}}};
  std::vector<double> hs;
  for (const auto& r : levels) {
    hs.push_back(r.h);
    series[0].values.push_back(r.final.err_u.value);
    series[1].values.push_back(r.final.err_p.value);
    series[2].values.push_back(r.final.err_rho.value);
    series[3].values.push_back(r.final.err_phi.value);
  }
  double lo = 1e300, hi = 0.0;
  for (const auto& s : series) {
    for (double v : s.values) {
      if (v > 0.0) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!(hi > 0.0)) lo = hi = 1.0;
  const double y0 = std::floor(std::log10(lo)), y1 = std::max(y0 + 1.0, std::ceil(std::log10(hi)));
  const auto [hmin, hmax] = std::minmax_element(hs.begin(), hs.end());
  const double x0 = std::log10(*hmin) - 0.1, x1 = std::log10(*hmax) + 0.1;
  const auto px = [&](double h) { return left + (std::log10(h) - x0) / (x1 - x0) * (width - left - right); };
  const auto py = [&](double e) { return top + (y1 - std::log10(e)) / (y1 - y0) * (height - top - bottom); };

  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
      << ": relative error vs h</text>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                left, top, width - left - right, height - top - bottom);
  out << buf;
  for (double d = y0; d <= y1 + 1e-9; d += 1.0) {
    const double y = py(std::pow(10.0, d));
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/><text x=\"%.1f\" y=\"%.1f\" "
                  "text-anchor=\"end\">1e%d</text>\n",
                  left, y, width - right, y, left - 6, y + 4, static_cast<int>(d));
    out << buf;
  }
  for (double h : hs) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%g</text>\n", px(h),
                  height - bottom + 18, h);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">h</text>\n",
                left + (width - left - right) / 2, height - 16);
  out << buf;

  // Slope-1 guide anchored at the coarsest velocity error.
  if (series[0].values.front() > 0.0) {
    const double e_coarse = series[0].values.front();
    const double e_fine = e_coarse * (*hmin / *hmax);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n",
                  px(*hmax), py(e_coarse) - 20, px(*hmin), py(e_fine) - 20);
    out << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" fill=\"gray\">slope 1</text>\n", px(*hmin) + 4,
                  py(e_fine) - 20);
    out << buf;
  }

  double legend_y = top + 10;
  for (const auto& s : series) {
    std::string points;
    for (std::size_t k = 0; k < hs.size(); ++k) {
      if (!(s.values[k] > 0.0)) continue;
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", px(hs[k]), py(s.values[k]));
      points += buf;
    }
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
    for (std::size_t k = 0; k < hs.size(); ++k) {
      if (!(s.values[k] > 0.0)) continue;
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n", px(hs[k]),
                    py(s.values[k]), s.color);
      out << buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/><text "
                  "x=\"%.1f\" y=\"%.1f\">%s</text>\n",
                  width - right + 10, legend_y, width - right + 30, legend_y, s.color, width - right + 35,
                  legend_y + 4, s.name);
    out << buf;
    legend_y += 18;
  }
  out << "</svg>\n";
}

}  // namespace acflow::driver
