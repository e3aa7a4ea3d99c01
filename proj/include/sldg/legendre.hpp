#pragma once

// Legendre basis on [-1,1], Gauss-Legendre quadrature and the periodic
// 1D cell domain.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sldg {

// Values P_0(xi) .. P_p(xi) written into out[0..p].
inline void legendre_eval_all(int p, double xi, double* out) {
  out[0] = 1.0;
  if (p >= 1) out[1] = xi;
  for (int j = 1; j < p; ++j)
    out[j + 1] = ((2 * j + 1) * xi * out[j] - j * out[j - 1]) / (j + 1);
}

inline std::vector<double> legendre_eval_all(int p, double xi) {
  if (p < 0) throw std::invalid_argument("legendre_eval_all: negative degree");
  std::vector<double> v(static_cast<std::size_t>(p) + 1);
  legendre_eval_all(p, xi, v.data());
  return v;
}

struct QuadratureRule {
  std::vector<double> nodes;    // ascending, in [-1,1]
  std::vector<double> weights;  // positive, summing to 2

  std::size_t n() const { return nodes.size(); }
};

namespace detail {

// P_n(x) and P_n'(x) by recurrence.
inline void legendre_with_derivative(int n, double x, double& pn, double& dpn) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    pn = 1.0;
    dpn = 0.0;
    return;
  }
  for (int j = 1; j < n; ++j) {
    double p2 = ((2 * j + 1) * x * p1 - j * p0) / (j + 1);
    p0 = p1;
    p1 = p2;
  }
  pn = p1;
  dpn = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace detail

// Roots of P_n by Newton iteration from the Tricomi-style initial guess
// cos(pi (i - 1/4) / (n + 1/2)); weights 2 / ((1 - x^2) P_n'(x)^2).
inline QuadratureRule gauss_legendre_rule(int n) {
  if (n < 1 || n > 64)
    throw std::invalid_argument("gauss_legendre_rule: node count " +
                                std::to_string(n) + " outside [1,64]");
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  if (n == 1) {
    rule.weights[0] = 2.0;
    return rule;
  }
  int const half = (n + 1) / 2;
  for (int i = 1; i <= half; ++i) {
    double x = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
    double pn = 0.0, dpn = 0.0;
    for (int it = 0; it < 100; ++it) {
      detail::legendre_with_derivative(n, x, pn, dpn);
      double const dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    detail::legendre_with_derivative(n, x, pn, dpn);
    double const w = 2.0 / ((1.0 - x * x) * dpn * dpn);
    // guesses run from the largest root downwards
    rule.nodes[n - i] = x;
    rule.nodes[i - 1] = -x;
    rule.weights[n - i] = w;
    rule.weights[i - 1] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// Periodic interval [x_min, x_max) split into n equal cells.
struct Domain1D {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n = 1;

  Domain1D() = default;
  Domain1D(double lo, double hi, std::size_t cells) : x_min(lo), x_max(hi), n(cells) {
    if (cells < 1) throw std::invalid_argument("Domain1D: need at least one cell");
    if (!(hi > lo)) throw std::invalid_argument("Domain1D: x_max must exceed x_min");
  }

  double length() const { return x_max - x_min; }
  double h() const { return (x_max - x_min) / static_cast<double>(n); }
  double center(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * h(); }
  double left(std::size_t i) const { return x_min + static_cast<double>(i) * h(); }

  // Cell owning x under half-open [left, right) convention, after periodic wrap.
  // Writes the local coordinate in [-1,1) to xi.
  std::size_t locate(double x, double& xi) const {
    double const len = length();
    double y = std::fmod(x - x_min, len);
    if (y < 0.0) y += len;
    if (y >= len) y = 0.0;
    double const s = y / h();
    auto i = static_cast<std::size_t>(std::floor(s));
    if (i >= n) i = n - 1;
    xi = 2.0 * (s - static_cast<double>(i)) - 1.0;
    return i;
  }

  bool operator==(Domain1D const&) const = default;
};

}  // namespace sldg
