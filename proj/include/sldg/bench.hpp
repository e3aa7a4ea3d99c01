#pragma once

// Bandwidth benchmark for the 1D advection step.
//
// Traffic model: every step loads and stores each coefficient once, so
// bytes_per_step = 2 N (8d + 4(o-d)). Matrix and index traffic is ignored.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "advection.hpp"
#include "mixed_storage.hpp"
#include "parallel.hpp"
#include "projection.hpp"
#include "snapshot.hpp"

namespace sldg {

struct BenchConfig {
  int o = 4;
  int d = 1;
  std::size_t cells = std::size_t{1} << 24;
  std::size_t steps = 50;
  std::size_t warmup_steps = 5;
  std::size_t repetitions = 5;
  int threads = 0;  // 0: leave the runtime default
  Kernel kernel = Kernel::specialized;
  double nu = 2.25;
  bool streaming = false;  // require a working set of at least 4x the last-level cache
};

struct BenchReport {
  int order = 0;
  int n_double = 0;
  double bandwidth_gb_s = 0.0;
  double speedup = 1.0;
  double memorydown = 1.0;
  double elapsed_s = 0.0;  // median over repetitions
  int flops_per_dof = 0;
  std::uint64_t bytes_per_step = 0;
  std::uint64_t cells = 0;
  std::uint64_t steps = 0;
  int threads = 1;
  std::string kernel;
  std::uint64_t fingerprint = 0;  // hash of the final grid
  std::vector<std::string> warnings;
};

struct BenchResult {
  BenchReport baseline;  // d = o
  BenchReport report;
};

inline int flops_per_dof(int o) { return 4 * o - 1; }

inline std::uint64_t bytes_per_step(std::size_t cells, PrecisionLayout const& l) {
  return 2u * static_cast<std::uint64_t>(cells) * l.bytes_per_cell();
}

// Size in bytes of the largest CPU cache reported by sysfs, or nullopt.
inline std::optional<std::uint64_t> last_level_cache_bytes() {
  std::uint64_t best = 0;
  for (int idx = 0; idx < 16; ++idx) {
    std::ifstream in("/sys/devices/system/cpu/cpu0/cache/index" + std::to_string(idx) + "/size");
    if (!in) continue;
    std::string s;
    in >> s;
    if (s.empty()) continue;
    std::uint64_t mult = 1;
    char const suffix = s.back();
    if (suffix == 'K') mult = 1024;
    if (suffix == 'M') mult = 1024 * 1024;
    if (suffix == 'G') mult = 1024ull * 1024 * 1024;
    if (mult != 1) s.pop_back();
    try {
      best = std::max<std::uint64_t>(best, std::stoull(s) * mult);
    } catch (std::exception const&) {
    }
  }
  if (best == 0) return std::nullopt;
  return best;
}

// FNV-1a over the snapshot encoding.
inline std::uint64_t grid_fingerprint(CoefficientGrid const& g) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : snapshot_bytes(g)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline CoefficientGrid bench_initial_grid(std::size_t cells, PrecisionLayout const& l) {
  Domain1D const dom(0.0, 1.0, cells);
  return project_function([](double x) { return 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * x); },
                          dom, l, l.o);
}

namespace detail {

inline BenchReport time_layout(BenchConfig const& cfg, PrecisionLayout const& layout) {
  BenchReport r;
  r.order = layout.o;
  r.n_double = layout.d;
  r.memorydown = memorydown(layout);
  r.flops_per_dof = flops_per_dof(layout.o);
  r.bytes_per_step = bytes_per_step(cfg.cells, layout);
  r.cells = cfg.cells;
  r.steps = cfg.steps;
  r.threads = max_threads();

  auto grid = bench_initial_grid(cfg.cells, layout);
  CoefficientGrid other(grid.domain(), layout);
  auto const shift = shift_decompose(cfg.nu);
  auto const m = compute_shift_matrices(shift.alpha, layout.o);
  Kernel used = cfg.kernel;
  auto step = [&] {
    used = advect_with(grid, shift, m, other, cfg.kernel);
    std::swap(grid, other);
  };
  for (std::size_t k = 0; k < cfg.warmup_steps; ++k) step();
  std::vector<double> times;
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    auto const t0 = std::chrono::steady_clock::now();
    for (std::size_t k = 0; k < cfg.steps; ++k) step();
    auto const t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  r.elapsed_s = times[times.size() / 2];
  r.bandwidth_gb_s =
      static_cast<double>(r.bytes_per_step) * static_cast<double>(r.steps) / r.elapsed_s / 1e9;
  r.kernel = std::string(kernel_name(used));
  r.fingerprint = grid_fingerprint(grid);
  return r;
}

}  // namespace detail

inline void validate(BenchConfig const& cfg) {
  PrecisionLayout(cfg.o, cfg.d);
  if (cfg.cells < 2) throw std::invalid_argument("bench: need at least two cells");
  if (cfg.steps < 1) throw std::invalid_argument("bench: steps must be >= 1");
  if (cfg.repetitions < 5) throw std::invalid_argument("bench: need at least 5 repetitions");
  if (cfg.threads < 0) throw std::invalid_argument("bench: negative thread count");
}

// Whether a layout's working set is streaming-sized: N (8d + 4(o-d)) >= 4 LLC.
inline bool is_streaming_sized(std::size_t cells, PrecisionLayout const& l,
                               std::optional<std::uint64_t> llc = last_level_cache_bytes()) {
  if (!llc) return false;
  return static_cast<std::uint64_t>(cells) * l.bytes_per_cell() >= 4 * *llc;
}

// Baseline (d = o) run followed by the requested layout, same settings.
inline BenchResult run_bench(BenchConfig const& cfg) {
  validate(cfg);
  if (cfg.threads > 0) set_threads(cfg.threads);
  PrecisionLayout const layout(cfg.o, cfg.d);
  std::vector<std::string> warnings;
  bool const big = is_streaming_sized(cfg.cells, layout);
  if (cfg.streaming && !big)
    throw std::invalid_argument("bench: streaming run requires N*(8d+4(o-d)) >= 4x last-level cache");
  if (!big) warnings.push_back("working set may fit in cache; bandwidth reflects cache, not memory");

  BenchResult res;
  res.baseline = detail::time_layout(cfg, PrecisionLayout(cfg.o, cfg.o));
  res.baseline.warnings = warnings;
  res.report = detail::time_layout(cfg, layout);
  res.report.speedup = res.baseline.elapsed_s / res.report.elapsed_s;
  res.report.warnings = warnings;
  return res;
}

inline constexpr char const* bench_csv_header = "order,n_double,bandwidth_gbs,speedup,memorydown";

inline std::string report_csv_row(BenchReport const& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g", r.order, r.n_double, r.bandwidth_gb_s,
                r.speedup, r.memorydown);
  return buf;
}

inline nlohmann::json report_json(BenchReport const& r) {
  return {{"order", r.order},
          {"n_double", r.n_double},
          {"bandwidth_gbs", r.bandwidth_gb_s},
          {"speedup", r.speedup},
          {"memorydown", r.memorydown},
          {"elapsed_s", r.elapsed_s},
          {"flops_per_dof", r.flops_per_dof},
          {"bytes_per_step", r.bytes_per_step},
          {"cells", r.cells},
          {"steps", r.steps},
          {"threads", r.threads},
          {"kernel", r.kernel},
          {"fingerprint", r.fingerprint},
          {"warnings", r.warnings}};
}

enum class ReportFormat { csv, json };

inline ReportFormat parse_format(std::string_view s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw std::invalid_argument("unknown format '" + std::string(s) + "'");
}

inline std::string report_emit(std::vector<BenchReport> const& reports, ReportFormat fmt) {
  if (fmt == ReportFormat::json) {
    auto arr = nlohmann::json::array();
    for (auto const& r : reports) arr.push_back(report_json(r));
    return arr.dump(2) + "\n";
  }
  std::string out = std::string(bench_csv_header) + "\n";
  for (auto const& r : reports) out += report_csv_row(r) + "\n";
  return out;
}

inline std::string report_emit(BenchReport const& report, ReportFormat fmt) {
  return report_emit(std::vector<BenchReport>{report}, fmt);
}

}  // namespace sldg
