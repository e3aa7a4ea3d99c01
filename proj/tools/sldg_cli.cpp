// sldg: accuracy studies, single advections, bandwidth benchmarks and the
// Vlasov demo for the mixed-precision SLDG solver.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <sldg/commands.hpp>

namespace {

std::string read_file(std::string const& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --config PATH or --config=PATH anywhere on the command line.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string const a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.starts_with("--config=")) return a.substr(9);
  }
  return {};
}

void write_output(std::string const& path, std::string const& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << text;
}

struct Flags {
  CLI::Option* threads = nullptr;
};

Flags add_common(CLI::App* sub, sldg::RunConfig& cfg) {
  Flags f;
  sub->add_option("--config", "key=value file mirroring the long flags; flags override it");
  sub->add_option("--order", cfg.order, "coefficients per cell (degree + 1)")->capture_default_str();
  sub->add_option("--double-coeffs", cfg.double_coeffs,
                  "coefficients per cell kept in 64-bit (default: 1)");
  sub->add_option("--cells", cfg.cells, "cell count");
  sub->add_option("--steps", cfg.steps, "time steps");
  sub->add_option("--ic", cfg.ic, "initial condition");
  sub->add_option("--seed", cfg.seed, "seed for randomized initial data")->capture_default_str();
  f.threads = sub->add_option("--threads", cfg.threads,
                              "worker threads, 0 = runtime default (fallback: SLDG_THREADS)")
                  ->capture_default_str();
  sub->add_option("--output", cfg.output, "output path (default: standard output)");
  sub->add_option("--kernel", cfg.kernel, "advection kernel")
      ->check(CLI::IsMember({"specialized", "generic"}))
      ->capture_default_str();
  sub->add_option("--x-min", cfg.x_min, "left end of the periodic x-domain");
  sub->add_option("--x-max", cfg.x_max, "right end of the periodic x-domain");
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  sldg::RunConfig cfg;
  bool file_threads = false;
  try {
    if (auto const path = find_config_path(argc, argv); !path.empty()) {
      auto const keys = sldg::apply_config_text(cfg, read_file(path));
      file_threads = std::find(keys.begin(), keys.end(), "threads") != keys.end();
    }
  } catch (std::exception const& e) {
    std::cerr << "sldg: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"Mixed-precision semi-Lagrangian discontinuous Galerkin solver"};
  app.require_subcommand(1);

  auto* accuracy = app.add_subcommand(
      "accuracy", "error and mass drift of each mixed layout against the 64-bit run");
  auto fa = add_common(accuracy, cfg);
  accuracy->add_option("--nu", cfg.nu, "CFL number per step")->capture_default_str();

  auto* advect = app.add_subcommand("advect", "advect an initial value and write a snapshot");
  auto fb = add_common(advect, cfg);
  advect->add_option("--nu", cfg.nu, "CFL number per step")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "bandwidth benchmark against the 64-bit baseline");
  auto fc = add_common(bench, cfg);
  bench->add_option("--nu", cfg.nu, "CFL number per step")->capture_default_str();
  bench->add_option("--format", cfg.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  auto* vlasov = app.add_subcommand("vlasov", "1+1D Vlasov-Poisson Landau damping demo");
  auto fd = add_common(vlasov, cfg);
  vlasov->add_option("--dt", cfg.dt, "time step")->capture_default_str();
  vlasov->add_option("--cells-v", cfg.cells_v, "velocity cells (default: --cells)");
  vlasov->add_option("--v-max", cfg.v_max, "velocity cut-off")->capture_default_str();
  vlasov->add_option("--epsilon", cfg.epsilon, "density perturbation amplitude")
      ->capture_default_str();
  vlasov->add_flag("--no-field", cfg.no_field, "free streaming (E = 0)");

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    std::cerr << "sldg: " << e.what() << "\n\n" << app.help();
    return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
  }

  bool thread_flag = false;
  for (auto const& f : {fa, fb, fc, fd}) thread_flag = thread_flag || f.threads->count() > 0;
  if (!thread_flag && !file_threads)
    if (char const* env = std::getenv("SLDG_THREADS")) {
      try {
        cfg.threads = std::stoi(env);
      } catch (std::exception const&) {
        std::cerr << "sldg: ignoring malformed SLDG_THREADS='" << env << "'\n";
      }
    }

  try {
    if (accuracy->parsed()) {
      cfg.command = "accuracy";
      write_output(cfg.output, sldg::accuracy_csv(sldg::cmd_accuracy(cfg)));
    } else if (advect->parsed()) {
      cfg.command = "advect";
      if (cfg.output.empty()) cfg.output = "advect.sldg";
      std::cout << sldg::advect_summary_line(sldg::cmd_advect(cfg)) << '\n';
    } else if (bench->parsed()) {
      cfg.command = "bench";
      auto const res = sldg::run_bench(sldg::bench_config(cfg));
      for (auto const& w : res.report.warnings) std::cerr << "sldg: warning: " << w << '\n';
      write_output(cfg.output, sldg::report_emit({res.baseline, res.report},
                                                 sldg::parse_format(cfg.format)));
    } else if (vlasov->parsed()) {
      cfg.command = "vlasov";
      std::ostringstream diag;
      auto const run = sldg::cmd_vlasov(cfg, &diag);
      write_output(cfg.output, diag.str());
      if (run.boundary_warnings > 0)
        std::cerr << "sldg: warning: v-boundary cells held more than "
                  << sldg::boundary_mass_tolerance << " of the mass in " << run.boundary_warnings
                  << " step(s); increase --v-max\n";
    }
  } catch (std::exception const& e) {
    std::cerr << "sldg: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
