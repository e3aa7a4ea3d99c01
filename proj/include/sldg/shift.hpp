#pragma once

// Shift decomposition nu = i_star + alpha and the per-step transfer matrices.
//
// For target cell i the foot of the characteristic of local coordinate xi
// lies in source cell i - i_star for xi >= 2 alpha - 1 (local coordinate
// xi - 2 alpha) and in cell i - i_star - 1 otherwise (xi + 2 - 2 alpha).
// Re-projecting the translated piecewise polynomial gives
//
//   c_new[i][j] = sum_l A[j][l] c[i - i_star - 1][l] + B[j][l] c[i - i_star][l]
//
//   A[j][l] = (2j+1)/2 * int_{-1}^{2a-1} P_l(xi + 2 - 2a) P_j(xi) dxi
//   B[j][l] = (2j+1)/2 * int_{2a-1}^{1}  P_l(xi - 2a)     P_j(xi) dxi
//
// Both integrands have degree <= 2(o-1), so an o-point Gauss rule on each
// subinterval is exact.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "legendre.hpp"

namespace sldg {

struct ShiftDecomposition {
  double nu = 0.0;
  std::int64_t i_star = 0;
  double alpha = 0.0;
};

inline ShiftDecomposition shift_decompose(double nu) {
  if (!std::isfinite(nu)) throw std::invalid_argument("shift_decompose: non-finite CFL number");
  if (std::abs(nu) >= 9.0e15) throw std::invalid_argument("shift_decompose: CFL number too large");
  double const fl = std::floor(nu);
  ShiftDecomposition s{nu, static_cast<std::int64_t>(fl), nu - fl};
  // tiny negative nu rounds the fraction up to 1
  if (s.alpha >= 1.0) {
    s.i_star += 1;
    s.alpha = 0.0;
  }
  return s;
}

struct ShiftMatrices {
  double alpha = 0.0;
  int o = 1;
  std::vector<double> A;  // row-major o x o, farther source cell
  std::vector<double> B;  // row-major o x o, nearer source cell

  double a(int j, int l) const { return A[j * o + l]; }
  double b(int j, int l) const { return B[j * o + l]; }
};

inline ShiftMatrices compute_shift_matrices(double alpha, int o) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("compute_shift_matrices: alpha must lie in [0,1)");
  if (o < 1 || o > 64) throw std::invalid_argument("compute_shift_matrices: bad order");
  ShiftMatrices m;
  m.alpha = alpha;
  m.o = o;
  m.A.assign(static_cast<std::size_t>(o) * o, 0.0);
  m.B.assign(static_cast<std::size_t>(o) * o, 0.0);
  if (alpha == 0.0) {
    for (int j = 0; j < o; ++j) m.B[j * o + j] = 1.0;
    return m;
  }
  auto const rule = gauss_legendre_rule(o);
  std::vector<double> pj(o), pl(o);

  // integrate (2j+1)/2 P_l(xi + offset) P_j(xi) over [lo, hi] into M
  auto accumulate = [&](std::vector<double>& M, double lo, double hi, double offset) {
    double const half = 0.5 * (hi - lo);
    for (std::size_t q = 0; q < rule.n(); ++q) {
      double const xi = lo + half * (rule.nodes[q] + 1.0);
      legendre_eval_all(o - 1, xi, pj.data());
      legendre_eval_all(o - 1, xi + offset, pl.data());
      double const w = half * rule.weights[q];
      for (int j = 0; j < o; ++j)
        for (int l = 0; l < o; ++l) M[j * o + l] += w * pj[j] * pl[l];
    }
    for (int j = 0; j < o; ++j)
      for (int l = 0; l < o; ++l) M[j * o + l] *= 0.5 * (2 * j + 1);
  };
  accumulate(m.A, -1.0, 2.0 * alpha - 1.0, 2.0 - 2.0 * alpha);
  accumulate(m.B, 2.0 * alpha - 1.0, 1.0, -2.0 * alpha);

  // Mass row and constant column hold exactly in real arithmetic on the
  // stored values, so summing c_0 over cells carries no per-step bias.
  double const b00 = 1.0 - alpha;  // rounded; 1 - b00 is then exact
  m.A[0] = 1.0 - b00;
  m.B[0] = b00;
  for (int l = 1; l < o; ++l) m.B[l] = -m.A[l];
  for (int j = 1; j < o; ++j) m.B[j * o] = -m.A[j * o];
  return m;
}

}  // namespace sldg
