#pragma once

// L2 projection onto the per-cell Legendre basis, point evaluation and the
// mass and norm reductions over a CoefficientGrid.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "legendre.hpp"
#include "mixed_storage.hpp"

namespace sldg {

inline int default_quadrature_nodes(int order) { return std::max(order, 8); }

// Coefficients of f on one cell centered at xc with width h, 64-bit.
template <class F>
void project_cell(F const& f, double xc, double h, QuadratureRule const& rule,
                  int order, double* out) {
  std::vector<double> p(order);
  std::fill(out, out + order, 0.0);
  for (std::size_t q = 0; q < rule.n(); ++q) {
    double const fx = f(xc + 0.5 * h * rule.nodes[q]);
    legendre_eval_all(order - 1, rule.nodes[q], p.data());
    for (int j = 0; j < order; ++j) out[j] += rule.weights[q] * fx * p[j];
  }
  for (int j = 0; j < order; ++j) out[j] *= 0.5 * (2 * j + 1);
}

template <class F>
CoefficientGrid project_function(F const& f, Domain1D const& dom, PrecisionLayout const& layout,
                                 int quad_n) {
  if (quad_n < layout.o)
    throw std::invalid_argument("project_function: quadrature nodes below order");
  auto const rule = gauss_legendre_rule(quad_n);
  CoefficientGrid grid(dom, layout);
  std::vector<double> c(layout.o);
  for (std::size_t i = 0; i < dom.n; ++i) {
    project_cell(f, dom.center(i), dom.h(), rule, layout.o, c.data());
    grid.set_cell(i, c);
  }
  return grid;
}

template <class F>
CoefficientGrid project_function(F const& f, Domain1D const& dom, PrecisionLayout const& layout) {
  return project_function(f, dom, layout, default_quadrature_nodes(layout.o));
}

inline double evaluate(CoefficientGrid const& grid, double x) {
  double xi = 0.0;
  std::size_t const i = grid.domain().locate(x, xi);
  int const o = grid.order();
  double p[64];
  legendre_eval_all(o - 1, xi, p);
  double u = 0.0;
  for (int j = 0; j < o; ++j) u += grid.coeff(i, j) * p[j];
  return u;
}

// Pairwise sum over [0, n) of term(i); the split points depend only on n.
template <class Term>
double pairwise_sum(std::size_t lo, std::size_t hi, Term const& term) {
  if (hi - lo <= 16) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    return s;
  }
  std::size_t const mid = lo + (hi - lo) / 2;
  return pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term);
}

inline double total_mass(CoefficientGrid const& grid) {
  double const s = pairwise_sum(0, grid.cells(), [&](std::size_t i) { return grid.coeff(i, 0); });
  return grid.domain().h() * s;
}

// h * sum |c_i0|: the mass scale used to normalise drift for signed data.
inline double absolute_mass(CoefficientGrid const& grid) {
  double const s =
      pairwise_sum(0, grid.cells(), [&](std::size_t i) { return std::abs(grid.coeff(i, 0)); });
  return grid.domain().h() * s;
}

// Discrete L2 distance using the o-point Gauss rule per cell. Exact for the
// piecewise polynomial difference.
inline double l2_error(CoefficientGrid const& a, CoefficientGrid const& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("l2_error: grids differ in shape");
  int const o = a.order();
  auto const rule = gauss_legendre_rule(o);
  std::vector<double> pq(static_cast<std::size_t>(o) * o);
  for (int q = 0; q < o; ++q) legendre_eval_all(o - 1, rule.nodes[q], pq.data() + q * o);
  double const h = a.domain().h();
  double const s = pairwise_sum(0, a.cells(), [&](std::size_t i) {
    double acc = 0.0;
    for (int q = 0; q < o; ++q) {
      double diff = 0.0;
      for (int j = 0; j < o; ++j) diff += (a.coeff(i, j) - b.coeff(i, j)) * pq[q * o + j];
      acc += rule.weights[q] * diff * diff;
    }
    return 0.5 * h * acc;
  });
  return std::sqrt(s);
}

inline double l2_norm(CoefficientGrid const& a) {
  return l2_error(a, CoefficientGrid(a.domain(), a.layout()));
}

}  // namespace sldg
