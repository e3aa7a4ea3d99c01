#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <sldg/vlasov.hpp>

#include "oracles.hpp"

using namespace sldg;

namespace {

constexpr double pi = std::numbers::pi;

double grid_distance(PhaseSpaceGrid const& a, PhaseSpaceGrid const& b) {
  int const o = a.order();
  double s = 0.0;
  for (std::size_t ix = 0; ix < a.dom_x().n; ++ix)
    for (std::size_t iv = 0; iv < a.dom_v().n; ++iv)
      for (int jx = 0; jx < o; ++jx)
        for (int jv = 0; jv < o; ++jv) {
          double const d = a.coeff(ix, iv, jx, jv) - b.coeff(ix, iv, jx, jv);
          s += d * d / ((2 * jx + 1) * (2 * jv + 1));
        }
  return std::sqrt(s * a.dom_x().h() * a.dom_v().h());
}

PhaseSpaceGrid landau(std::size_t n, int o, int d, double eps, double v_max) {
  Domain1D const dx(0.0, 4.0 * pi, n), dv(-v_max, v_max, n);
  return project_function(landau_initial(eps, 0.5), dx, dv, PhaseLayout(o, d));
}

}  // namespace

TEST_CASE("density of simple distributions", "[vlasov]") {
  Domain1D const dx(0, 3, 6), dv(-2, 2, 5);
  int const o = 3;
  auto const flat = project_function([](double, double) { return 0.75; }, dx, dv,
                                     PhaseLayout::all_double(o));
  auto const rho = compute_density(flat);
  for (std::size_t i = 0; i < dx.n; ++i) {
    CHECK(rho[i * o] == Catch::Approx(2 * 2 * 0.75).epsilon(1e-15));
    CHECK(std::abs(rho[i * o + 1]) <= 1e-15);
    CHECK(std::abs(rho[i * o + 2]) <= 1e-15);
  }
  for (double r : compute_density(PhaseSpaceGrid(dx, dv, PhaseLayout(o, 1)))) CHECK(r == 0.0);

  // separable g(x) m(v): rho is (int m dv) times the 1D projection of g
  auto const g = [](double x) { return std::cos(1.3 * x) + 0.2 * x; };
  auto const m = [](double v) { return 1.0 + v * v; };  // int_-2^2 = 4 + 16/3
  auto const sep = project_function([&](double x, double v) { return g(x) * m(v); }, dx, dv,
                                    PhaseLayout::all_double(o));
  auto const g1 = project_function(g, dx, PrecisionLayout(o, o));
  auto const rs = compute_density(sep);
  for (std::size_t i = 0; i < dx.n; ++i)
    for (int j = 0; j < o; ++j) CHECK(std::abs(rs[i * o + j] - (4.0 + 16.0 / 3.0) * g1.coeff(i, j)) <= 1e-13);

  // int rho dx equals the total mass
  double s = 0.0;
  for (std::size_t i = 0; i < dx.n; ++i) s += dx.h() * rs[i * o];
  CHECK(std::abs(s - total_mass(sep)) <= 1e-12 * std::abs(total_mass(sep)));
}

TEST_CASE("Poisson solve", "[vlasov][field]") {
  SECTION("uniform density gives no field") {
    Domain1D const dx(0, 1, 10);
    std::vector<double> rho(30, 0.0);
    for (std::size_t i = 0; i < 10; ++i) rho[i * 3] = 1.7;
    auto const fs = solve_poisson(rho, dx, 3);
    for (double e : fs.E) CHECK(std::abs(e) <= 1e-14);
    CHECK(electric_energy(fs) <= 1e-28);
  }

  SECTION("cosine density converges to the analytic field") {
    double const eps = 0.3, k = 0.5;
    for (int o : {2, 3, 4}) {
      std::vector<double> hs, errs;
      for (std::size_t n : {8u, 16u, 32u, 64u}) {
        Domain1D const dx(0.0, 2 * pi / k, n);
        auto const r = project_function([&](double x) { return 1.0 + eps * std::cos(k * x); }, dx,
                                        PrecisionLayout(o, o));
        std::vector<double> rho(n * o);
        for (std::size_t i = 0; i < n; ++i)
          for (int j = 0; j < o; ++j) rho[i * o + j] = r.coeff(i, j);
        auto const fs = solve_poisson(rho, dx, o);
        auto const [nodes, w] = oracle::gauss_legendre(o);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          for (int q = 0; q < o; ++q) {
            double const x = dx.center(i) + 0.5 * dx.h() * nodes[q];
            err = std::max(err, std::abs(fs.E[i * o + q] - eps / k * std::sin(k * x)));
          }
        hs.push_back(dx.h());
        errs.push_back(err);
      }
      INFO("order " << o);
      CHECK(oracle::log_slope(hs, errs) >= o);
      CHECK(errs.back() <= 1e-3);
    }
  }

  SECTION("random density has a zero-mean field") {
    std::mt19937_64 rng(31);
    Domain1D const dx(-1, 2, 13);
    auto const rho = oracle::random_coefficients(13, 4, rng);
    auto const fs = solve_poisson(rho, dx, 4);
    CHECK(std::abs(field_mean(fs)) <= 1e-13);
    CHECK(electric_energy(fs) >= 0.0);
  }

  SECTION("a constant added to the density leaves the field unchanged") {
    // dyadic data keeps every operation exact
    std::mt19937_64 rng(32);
    std::uniform_int_distribution<int> u(-16, 16);
    Domain1D const dx(0, 4, 8);
    std::vector<double> rho(8 * 3);
    for (double& r : rho) r = u(rng) / 8.0;
    auto shifted = rho;
    for (std::size_t i = 0; i < 8; ++i) shifted[i * 3] += 0.625;
    auto const a = solve_poisson(rho, dx, 3);
    auto const b = solve_poisson(shifted, dx, 3);
    CHECK(a.E == b.E);
  }

  CHECK_THROWS_AS(solve_poisson(std::vector<double>(5), Domain1D(0, 1, 2), 3), std::invalid_argument);
}

TEST_CASE("electric energy quadrature", "[vlasov][field]") {
  Domain1D const dx(0, 1, 16);
  int const o = 4;
  auto const [nodes, w] = oracle::gauss_legendre(o);
  FieldState fs{dx, o, std::vector<double>(16 * o, 0.0), std::vector<double>(16 * o)};
  for (std::size_t i = 0; i < 16; ++i)
    for (int q = 0; q < o; ++q)
      fs.E[i * o + q] = std::sin(2 * pi * (dx.center(i) + 0.5 * dx.h() * nodes[q]));
  CHECK(electric_energy(fs) == Catch::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("free streaming matches per-line translation", "[vlasov][oracle]") {
  std::size_t const nx = 16, nv = 8;
  int const o = 3;
  Domain1D const dx(0, 1, nx), dv(-2, 2, nv);
  auto f = project_function(
      [](double x, double v) { return (1.0 + 0.5 * std::sin(2 * pi * x)) * std::exp(-v * v) + 0.1 * v; },
      dx, dv, PhaseLayout::all_double(o));
  auto const f0 = f;
  double const dt = 0.3;
  int const steps = 4;
  VlasovOptions const free{false};
  for (int s = 0; s < steps; ++s) {
    auto const res = vlasov_step(f, dt, free);
    for (double e : res.field.E) CHECK(e == 0.0);
  }

  // each (v-cell, v-node) line is translated in x by v dt / 2 twice per step
  auto const [nodes, w] = oracle::gauss_legendre(o);
  double max_err = 0.0;
  for (std::size_t iv = 0; iv < nv; ++iv) {
    std::vector<std::vector<double>> moved(o);
    for (int q = 0; q < o; ++q) {
      std::vector<double> line(nx * o, 0.0);
      for (std::size_t ix = 0; ix < nx; ++ix)
        for (int a = 0; a < o; ++a)
          for (int b = 0; b < o; ++b)
            line[ix * o + a] += f0.coeff(ix, iv, a, b) * oracle::legendre(b, nodes[q]);
      double const v = dv.center(iv) + 0.5 * dv.h() * nodes[q];
      double const nu = v * 0.5 * dt / dx.h();
      for (int s = 0; s < 2 * steps; ++s) line = oracle::translate_reproject(line, nx, o, nu);
      moved[q] = line;
    }
    for (std::size_t ix = 0; ix < nx; ++ix)
      for (int a = 0; a < o; ++a)
        for (int b = 0; b < o; ++b) {
          double c = 0.0;
          for (int q = 0; q < o; ++q) c += w[q] * moved[q][ix * o + a] * oracle::legendre(b, nodes[q]);
          c *= 0.5 * (2 * b + 1);
          max_err = std::max(max_err, std::abs(c - f.coeff(ix, iv, a, b)));
        }
  }
  CHECK(max_err <= 1e-12);
}

TEST_CASE("free streaming conserves the mass of every velocity line", "[vlasov][property]") {
  Domain1D const dx(0, 1, 12), dv(-3, 3, 6);
  int const o = 3;
  auto f = project_function([](double x, double v) { return 2.0 + std::cos(2 * pi * x) * std::sin(v); },
                            dx, dv, PhaseLayout(o, 1));
  auto row_mass = [&](PhaseSpaceGrid const& g, std::size_t iv) {
    double s = 0.0;
    for (std::size_t ix = 0; ix < dx.n; ++ix) s += g.coeff(ix, iv, 0, 0);
    return s * dx.h() * dv.h();
  };
  for (int s = 0; s < 5; ++s) {
    auto const before = f;
    vlasov_step(f, 0.17, VlasovOptions{false});
    for (std::size_t iv = 0; iv < dv.n; ++iv)
      CHECK(std::abs(row_mass(f, iv) - row_mass(before, iv)) <= 1e-13 * std::abs(row_mass(before, iv)));
  }
}

TEST_CASE("Strang splitting is second order", "[vlasov]") {
  std::vector<PhaseSpaceGrid> runs;
  for (double dt : {0.4, 0.2, 0.1}) {
    auto f = landau(16, 4, 7, 0.5, 6.0);
    auto const n = std::lround(2.0 / dt);
    for (long s = 0; s < n; ++s) vlasov_step(f, dt);
    runs.push_back(f);
  }
  double const ratio = grid_distance(runs[0], runs[1]) / grid_distance(runs[1], runs[2]);
  INFO("ratio " << ratio);
  CHECK(std::abs(ratio - 4.0) <= 0.5);
}

TEST_CASE("mixed-precision Landau run conserves mass", "[vlasov][property]") {
  auto f = landau(16, 3, 1, 0.05, 10.0);
  double const m0 = total_mass(f);
  for (int s = 0; s < 1000; ++s) vlasov_step(f, 0.1);
  CHECK(std::abs(total_mass(f) - m0) <= 1e-11 * m0);
}

TEST_CASE("boundary mass warning", "[vlasov]") {
  // a velocity cut-off inside the bulk, then one far out in the tail
  auto f = landau(8, 2, 1, 0.01, 2.0);
  CHECK(vlasov_step(f, 0.1).boundary_warning);
  auto g = landau(32, 2, 1, 0.01, 10.0);
  CHECK_FALSE(vlasov_step(g, 0.1).boundary_warning);
  CHECK_THROWS_AS(vlasov_step(g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(vlasov_step(g, -0.1), std::invalid_argument);
}

TEST_CASE("diagnostics rows", "[vlasov]") {
  auto const f = landau(8, 2, 3, 0.1, 6.0);
  auto const row = diagnostics(f, 3, 0.3);
  CHECK(row.step == 3);
  CHECK(row.mass == total_mass(f));
  CHECK(row.electric_energy > 0.0);
  CHECK(row.l2_norm == l2_norm(f));
  std::ostringstream os;
  write_diagnostics_row(os, row);
  std::istringstream in(os.str());
  std::string cell;
  std::vector<std::string> cells;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  REQUIRE(cells.size() == 5);
  CHECK(std::stod(cells[2]) == row.mass);
  CHECK(std::stod(cells[3]) == row.electric_energy);
  CHECK(std::string(diagnostics_header) == "step,time,mass,electric_energy,l2_norm");
}
