#pragma once

// Command implementations behind the sldg command-line tool and the textual
// run configuration (key=value lines mirroring the long flag names).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "advection.hpp"
#include "bench.hpp"
#include "parallel.hpp"
#include "projection.hpp"
#include "snapshot.hpp"
#include "vlasov.hpp"

namespace sldg {

struct RunConfig {
  std::string command;
  int order = 4;
  std::optional<int> double_coeffs;
  std::optional<std::size_t> cells;
  std::optional<std::size_t> cells_v;
  std::optional<std::size_t> steps;
  double nu = 2.25;
  double dt = 0.1;
  std::string ic;
  std::uint64_t seed = 42;
  int threads = 0;
  std::string format = "csv";
  std::string output;
  std::string kernel = "specialized";
  std::optional<double> x_min;
  std::optional<double> x_max;
  double v_max = 8.0;
  double epsilon = 0.01;
  bool no_field = false;

  bool operator==(RunConfig const&) const = default;
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string trim(std::string s) {
  auto const b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto const e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string const& key, std::string const& v) {
  std::size_t pos = 0;
  T out{};
  try {
    if constexpr (std::is_same_v<T, double>)
      out = std::stod(v, &pos);
    else if constexpr (std::is_same_v<T, int>)
      out = std::stoi(v, &pos);
    else {
      if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
      out = static_cast<T>(std::stoull(v, &pos));
    }
  } catch (std::exception const&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty())
    throw std::invalid_argument("config: bad value '" + v + "' for " + key);
  return out;
}

inline bool parse_bool(std::string const& key, std::string const& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad value '" + v + "' for " + key);
}

}  // namespace detail

// Applies key=value lines to cfg and returns the keys seen. Blank lines and
// '#' comments are skipped.
inline std::vector<std::string> apply_config_text(RunConfig& cfg, std::string const& text) {
  using detail::parse_number;
  std::vector<std::string> keys;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto const eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: expected key=value: " + line);
    std::string key = detail::trim(line.substr(0, eq));
    std::string const val = detail::trim(line.substr(eq + 1));
    if (key.starts_with("--")) key = key.substr(2);
    if (key == "command") cfg.command = val;
    else if (key == "order") cfg.order = parse_number<int>(key, val);
    else if (key == "double-coeffs") cfg.double_coeffs = parse_number<int>(key, val);
    else if (key == "cells") cfg.cells = parse_number<std::size_t>(key, val);
    else if (key == "cells-v") cfg.cells_v = parse_number<std::size_t>(key, val);
    else if (key == "steps") cfg.steps = parse_number<std::size_t>(key, val);
    else if (key == "nu") cfg.nu = parse_number<double>(key, val);
    else if (key == "dt") cfg.dt = parse_number<double>(key, val);
    else if (key == "ic") cfg.ic = val;
    else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, val);
    else if (key == "threads") cfg.threads = parse_number<int>(key, val);
    else if (key == "format") cfg.format = val;
    else if (key == "output") cfg.output = val;
    else if (key == "kernel") cfg.kernel = val;
    else if (key == "x-min") cfg.x_min = parse_number<double>(key, val);
    else if (key == "x-max") cfg.x_max = parse_number<double>(key, val);
    else if (key == "v-max") cfg.v_max = parse_number<double>(key, val);
    else if (key == "epsilon") cfg.epsilon = parse_number<double>(key, val);
    else if (key == "no-field") cfg.no_field = detail::parse_bool(key, val);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
    keys.push_back(key);
  }
  return keys;
}

inline RunConfig parse_config_text(std::string const& text) {
  RunConfig cfg;
  apply_config_text(cfg, text);
  return cfg;
}

inline std::string config_to_text(RunConfig const& c) {
  using detail::fmt_double;
  std::ostringstream os;
  if (!c.command.empty()) os << "command=" << c.command << '\n';
  os << "order=" << c.order << '\n';
  if (c.double_coeffs) os << "double-coeffs=" << *c.double_coeffs << '\n';
  if (c.cells) os << "cells=" << *c.cells << '\n';
  if (c.cells_v) os << "cells-v=" << *c.cells_v << '\n';
  if (c.steps) os << "steps=" << *c.steps << '\n';
  os << "nu=" << fmt_double(c.nu) << '\n';
  os << "dt=" << fmt_double(c.dt) << '\n';
  if (!c.ic.empty()) os << "ic=" << c.ic << '\n';
  os << "seed=" << c.seed << '\n';
  os << "threads=" << c.threads << '\n';
  os << "format=" << c.format << '\n';
  if (!c.output.empty()) os << "output=" << c.output << '\n';
  os << "kernel=" << c.kernel << '\n';
  if (c.x_min) os << "x-min=" << fmt_double(*c.x_min) << '\n';
  if (c.x_max) os << "x-max=" << fmt_double(*c.x_max) << '\n';
  os << "v-max=" << fmt_double(c.v_max) << '\n';
  os << "epsilon=" << fmt_double(c.epsilon) << '\n';
  os << "no-field=" << (c.no_field ? "true" : "false") << '\n';
  return os.str();
}

// Built-in 1D initial values on [x_min, x_max).
//   smooth:      sin(2 pi x / L)
//   oscillatory: sum_{m=1..8} sin(2 pi m x / L + phi_m) / m, phases from seed
inline std::function<double(double)> make_initial_condition(std::string const& name, double x_min,
                                                             double length, std::uint64_t seed) {
  double const k = 2.0 * std::numbers::pi / length;
  if (name == "smooth") return [=](double x) { return std::sin(k * (x - x_min)); };
  if (name == "oscillatory") {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<double> phi(8);
    for (double& p : phi) p = phase(rng);
    return [=](double x) {
      double s = 0.0;
      for (int m = 1; m <= 8; ++m) s += std::sin(k * m * (x - x_min) + phi[m - 1]) / m;
      return s;
    };
  }
  throw std::invalid_argument("unknown initial condition '" + name + "'");
}

// Mass change relative to the larger of |mass| and the absolute mass, so
// zero-mean data still has a meaningful scale.
inline double relative_mass_drift(double mass0, double mass1, double abs_mass0) {
  double const scale = std::max(std::abs(mass0), abs_mass0);
  return scale > 0.0 ? std::abs(mass1 - mass0) / scale : std::abs(mass1 - mass0);
}

struct AccuracyRow {
  int order = 0;
  int n_double = 0;
  double error = 0.0;
  double error_mass = 0.0;
};

inline constexpr char const* accuracy_csv_header = "order,n_double,error,error_mass";

inline Domain1D domain_1d(RunConfig const& cfg, std::size_t default_cells) {
  return Domain1D(cfg.x_min.value_or(0.0), cfg.x_max.value_or(1.0), cfg.cells.value_or(default_cells));
}

// Advects the chosen initial value for each d in {o, ..., 0} and compares to d = o.
inline std::vector<AccuracyRow> cmd_accuracy(RunConfig const& cfg) {
  if (cfg.threads > 0) set_threads(cfg.threads);
  auto const dom = domain_1d(cfg, 256);
  auto const ic = make_initial_condition(cfg.ic.empty() ? "smooth" : cfg.ic, dom.x_min,
                                         dom.length(), cfg.seed);
  std::size_t const steps = cfg.steps.value_or(10000);
  Kernel const kernel = parse_kernel(cfg.kernel);
  int const o = cfg.order;

  std::vector<AccuracyRow> rows;
  std::optional<CoefficientGrid> reference;
  for (int d = o; d >= 0; --d) {
    PrecisionLayout const layout(o, d);
    auto grid = project_function(ic, dom, layout);
    double const m0 = total_mass(grid);
    double const am0 = absolute_mass(grid);
    advect_steps(grid, cfg.nu, steps, kernel);
    AccuracyRow row{o, d, 0.0, relative_mass_drift(m0, total_mass(grid), am0)};
    if (!reference) {
      reference = grid;
    } else {
      // compare as 64-bit values on the reference layout
      CoefficientGrid promoted(dom, reference->layout());
      for (std::size_t i = 0; i < dom.n; ++i) promoted.set_cell(i, grid.get_cell(i));
      row.error = l2_error(promoted, *reference);
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::string accuracy_csv(std::vector<AccuracyRow> const& rows) {
  std::string out = std::string(accuracy_csv_header) + "\n";
  char buf[128];
  for (auto const& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", r.order, r.n_double, r.error,
                  r.error_mass);
    out += buf;
  }
  return out;
}

struct AdvectSummary {
  CoefficientGrid initial;
  CoefficientGrid final_state;
  double mass = 0.0;
  double l2_norm = 0.0;
  double max_coeff = 0.0;
  std::string kernel;
};

inline AdvectSummary cmd_advect(RunConfig const& cfg) {
  if (cfg.threads > 0) set_threads(cfg.threads);
  auto const dom = domain_1d(cfg, 256);
  auto const ic = make_initial_condition(cfg.ic.empty() ? "smooth" : cfg.ic, dom.x_min,
                                         dom.length(), cfg.seed);
  PrecisionLayout const layout(cfg.order, cfg.double_coeffs.value_or(1));
  Kernel const kernel = parse_kernel(cfg.kernel);
  AdvectSummary s;
  s.initial = project_function(ic, dom, layout);
  s.final_state = s.initial;
  advect_steps(s.final_state, cfg.nu, cfg.steps.value_or(100), kernel);
  s.mass = total_mass(s.final_state);
  s.l2_norm = l2_norm(s.final_state);
  for (std::size_t i = 0; i < dom.n; ++i)
    for (int j = 0; j < layout.o; ++j)
      s.max_coeff = std::max(s.max_coeff, std::abs(s.final_state.coeff(i, j)));
  s.kernel = std::string(kernel_name(
      has_specialized_kernel(layout) ? kernel : Kernel::generic));
  if (!cfg.output.empty()) write_snapshot(cfg.output, s.final_state);
  return s;
}

inline std::string advect_summary_line(AdvectSummary const& s) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "mass=%.17g l2_norm=%.17g max_coeff=%.17g kernel=%s", s.mass,
                s.l2_norm, s.max_coeff, s.kernel.c_str());
  return buf;
}

inline BenchConfig bench_config(RunConfig const& cfg) {
  BenchConfig b;
  b.o = cfg.order;
  b.d = cfg.double_coeffs.value_or(1);
  b.cells = cfg.cells.value_or(b.cells);
  b.steps = cfg.steps.value_or(b.steps);
  b.threads = cfg.threads;
  b.kernel = parse_kernel(cfg.kernel);
  b.nu = cfg.nu;
  return b;
}

inline std::string cmd_bench(RunConfig const& cfg) {
  auto const fmt = parse_format(cfg.format);
  auto const res = run_bench(bench_config(cfg));
  return report_emit(std::vector<BenchReport>{res.baseline, res.report}, fmt);
}

struct VlasovRun {
  std::vector<DiagnosticsRow> rows;
  PhaseSpaceGrid final_state;
  std::size_t boundary_warnings = 0;
};

inline PhaseSpaceGrid vlasov_initial(RunConfig const& cfg) {
  int const o = cfg.order;
  PhaseLayout const layout(o, cfg.double_coeffs.value_or(1));
  std::string const ic = cfg.ic.empty() ? "landau" : cfg.ic;
  if (ic != "landau") throw std::invalid_argument("unknown Vlasov initial condition '" + ic + "'");
  double const k = 0.5;
  Domain1D const dx(cfg.x_min.value_or(0.0), cfg.x_max.value_or(2.0 * std::numbers::pi / k),
                    cfg.cells.value_or(32));
  Domain1D const dv(-cfg.v_max, cfg.v_max, cfg.cells_v.value_or(cfg.cells.value_or(32)));
  double const L = dx.length();
  double const x0 = dx.x_min;
  double const eps = cfg.epsilon;
  return project_function(
      [=](double x, double v) {
        return (1.0 + eps * std::cos(2.0 * std::numbers::pi * (x - x0) / L)) *
               std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi);
      },
      dx, dv, layout);
}

// Runs the Strang-split driver, emitting one diagnostics row per step
// (including the initial state) to `out` when given.
inline VlasovRun cmd_vlasov(RunConfig const& cfg, std::ostream* out = nullptr) {
  if (cfg.threads > 0) set_threads(cfg.threads);
  VlasovOptions const opt{!cfg.no_field};
  VlasovRun run;
  run.final_state = vlasov_initial(cfg);
  std::size_t const steps = cfg.steps.value_or(100);
  if (out) *out << diagnostics_header << '\n';
  auto emit = [&](std::size_t n) {
    run.rows.push_back(diagnostics(run.final_state, n, cfg.dt * static_cast<double>(n), opt));
    if (out) write_diagnostics_row(*out, run.rows.back());
  };
  emit(0);
  for (std::size_t n = 1; n <= steps; ++n) {
    auto const r = vlasov_step(run.final_state, cfg.dt, opt);
    run.boundary_warnings += r.boundary_warning;
    emit(n);
  }
  return run;
}

}  // namespace sldg
