#pragma once

// 1+1D Vlasov-Poisson driver
//
//   f_t + v f_x + E(x) f_v = 0,    E_x = rho - mean(rho),    rho = int f dv
//
// advanced by Strang splitting into x- and v-sweeps of the SLDG line update.
// The v-domain is truncated and treated as periodic.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "legendre.hpp"
#include "phase_space.hpp"
#include "projection.hpp"

namespace sldg {

struct FieldState {
  Domain1D dom_x;
  int o = 1;
  std::vector<double> rho;  // Legendre coefficients, rho[i*o + j]
  std::vector<double> E;    // values at the o Gauss nodes of each cell, E[i*o + q]
};

// rho[i*o + jx] = h_v * sum_k c_{(i,k),(jx,0)}
inline std::vector<double> compute_density(PhaseSpaceGrid const& f) {
  int const o = f.order();
  std::size_t const nx = f.dom_x().n, nv = f.dom_v().n;
  double const hv = f.dom_v().h();
  std::vector<double> rho(nx * o, 0.0);
  for (std::size_t i = 0; i < nx; ++i)
    for (int jx = 0; jx < o; ++jx) {
      double const s = pairwise_sum(0, nv, [&](std::size_t k) { return f.coeff(i, k, jx, 0); });
      rho[i * o + jx] = hv * s;
    }
  return rho;
}

// Exact cell-wise antiderivative of rho - mean(rho), with the zero-mean gauge.
inline FieldState solve_poisson(std::vector<double> const& rho, Domain1D const& dom_x, int o) {
  std::size_t const nx = dom_x.n;
  if (rho.size() != nx * static_cast<std::size_t>(o))
    throw std::invalid_argument("solve_poisson: density size mismatch");
  double const h = dom_x.h();
  double const mean =
      pairwise_sum(0, nx, [&](std::size_t i) { return rho[i * o]; }) / static_cast<double>(nx);
  auto const rule = gauss_legendre_rule(o);
  std::vector<double> p(o + 1);

  FieldState fs{dom_x, o, rho, std::vector<double>(nx * o, 0.0)};
  double left = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    double const* r = rho.data() + i * o;
    for (int q = 0; q < o; ++q) {
      double const xi = rule.nodes[q];
      legendre_eval_all(o, xi, p.data());
      double integral = (r[0] - mean) * (xi + 1.0);
      for (int j = 1; j < o; ++j) integral += r[j] * (p[j + 1] - p[j - 1]) / (2 * j + 1);
      fs.E[i * o + q] = left + 0.5 * h * integral;
    }
    left += h * (r[0] - mean);
  }
  double const avg = pairwise_sum(0, nx, [&](std::size_t i) {
                       double s = 0.0;
                       for (int q = 0; q < o; ++q) s += rule.weights[q] * fs.E[i * o + q];
                       return 0.5 * h * s;
                     }) /
                     dom_x.length();
  for (double& e : fs.E) e -= avg;
  return fs;
}

// 1/2 int E^2 dx by the o-point Gauss rule per cell.
inline double electric_energy(FieldState const& fs) {
  auto const rule = gauss_legendre_rule(fs.o);
  int const o = fs.o;
  double const h = fs.dom_x.h();
  double const s = pairwise_sum(0, fs.dom_x.n, [&](std::size_t i) {
    double acc = 0.0;
    for (int q = 0; q < o; ++q) acc += rule.weights[q] * fs.E[i * o + q] * fs.E[i * o + q];
    return 0.5 * h * acc;
  });
  return 0.5 * s;
}

inline double field_mean(FieldState const& fs) {
  auto const rule = gauss_legendre_rule(fs.o);
  double s = 0.0;
  for (std::size_t i = 0; i < fs.dom_x.n; ++i)
    for (int q = 0; q < fs.o; ++q) s += 0.5 * fs.dom_x.h() * rule.weights[q] * fs.E[i * fs.o + q];
  return s / fs.dom_x.length();
}

inline FieldState compute_field(PhaseSpaceGrid const& f) {
  return solve_poisson(compute_density(f), f.dom_x(), f.order());
}

// Fraction of total |mass| held in the first and last v-cells.
inline double boundary_mass_fraction(PhaseSpaceGrid const& f) {
  std::size_t const nx = f.dom_x().n, nv = f.dom_v().n;
  double edge = 0.0, all = 0.0;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t k = 0; k < nv; ++k) {
      double const m = std::abs(f.coeff(i, k, 0, 0));
      all += m;
      if (k == 0 || k + 1 == nv) edge += m;
    }
  return all > 0.0 ? edge / all : 0.0;
}

inline constexpr double boundary_mass_tolerance = 1e-12;

struct VlasovOptions {
  bool field_enabled = true;  // false: free streaming, E = 0
};

struct StepResult {
  FieldState field;
  bool boundary_warning = false;
};

// CFL numbers for the x-sweep: one per (v-cell, v-node) line.
inline std::vector<double> x_sweep_cfl(PhaseSpaceGrid const& f, double dt) {
  int const o = f.order();
  auto const rule = gauss_legendre_rule(o);
  auto const& dv = f.dom_v();
  double const hx = f.dom_x().h();
  std::vector<double> nus(dv.n * o);
  for (std::size_t k = 0; k < dv.n; ++k)
    for (int q = 0; q < o; ++q) {
      double const v = dv.center(k) + 0.5 * dv.h() * rule.nodes[q];
      nus[k * o + q] = v * dt / hx;
    }
  return nus;
}

// CFL numbers for the v-sweep: one per (x-cell, x-node) line.
inline std::vector<double> v_sweep_cfl(FieldState const& fs, double hv, double dt) {
  std::vector<double> nus(fs.E.size());
  for (std::size_t k = 0; k < nus.size(); ++k) nus[k] = fs.E[k] * dt / hv;
  return nus;
}

// One Strang step: x by dt/2, field solve, v by dt, x by dt/2.
inline StepResult vlasov_step(PhaseSpaceGrid& f, double dt, VlasovOptions const& opt = {}) {
  if (!(dt > 0.0)) throw std::invalid_argument("vlasov_step: dt must be positive");
  PhaseSpaceGrid tmp(f.dom_x(), f.dom_v(), f.layout());
  auto const half = x_sweep_cfl(f, 0.5 * dt);

  advect_rows(f, half, Axis::x, tmp);

  StepResult res;
  if (opt.field_enabled) {
    res.field = compute_field(tmp);
  } else {
    res.field = FieldState{f.dom_x(), f.order(), compute_density(tmp),
                           std::vector<double>(f.dom_x().n * f.order(), 0.0)};
  }
  advect_rows(tmp, v_sweep_cfl(res.field, f.dom_v().h(), dt), Axis::v, f);

  advect_rows(f, half, Axis::x, tmp);
  std::swap(f, tmp);
  res.boundary_warning = boundary_mass_fraction(f) > boundary_mass_tolerance;
  return res;
}

struct DiagnosticsRow {
  std::size_t step = 0;
  double time = 0.0;
  double mass = 0.0;
  double electric_energy = 0.0;
  double l2_norm = 0.0;
};

inline DiagnosticsRow diagnostics(PhaseSpaceGrid const& f, std::size_t step, double time,
                                  VlasovOptions const& opt = {}) {
  double energy = 0.0;
  if (opt.field_enabled) energy = electric_energy(compute_field(f));
  return {step, time, total_mass(f), energy, l2_norm(f)};
}

inline constexpr char const* diagnostics_header = "step,time,mass,electric_energy,l2_norm";

inline void write_diagnostics_row(std::ostream& os, DiagnosticsRow const& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g", r.step, r.time, r.mass,
                r.electric_energy, r.l2_norm);
  os << buf << '\n';
}

// Linear/nonlinear Landau damping initial value on [0, 2pi/k] x [-v_max, v_max].
inline auto landau_initial(double amplitude, double k) {
  return [amplitude, k](double x, double v) {
    return (1.0 + amplitude * std::cos(k * x)) * std::exp(-0.5 * v * v) /
           std::sqrt(2.0 * std::numbers::pi);
  };
}

}  // namespace sldg
