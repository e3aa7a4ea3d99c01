#pragma once

// Tensor-product DG grid over (x, v) with mixed-precision coefficient
// storage, and directional sweeps built from the 1D line update.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "advection.hpp"
#include "legendre.hpp"
#include "mixed_storage.hpp"
#include "projection.hpp"

namespace sldg {

// Coefficient (jx, jv) is stored in 64-bit iff jx + jv < d, 0 <= d <= 2o-1.
// d = 2o-1 stores everything in 64-bit.
struct PhaseLayout {
  int o = 1;
  int d = 1;

  PhaseLayout() = default;
  PhaseLayout(int order, int wide_degrees) : o(order), d(wide_degrees) {
    if (order < 1 || order > 16) throw std::invalid_argument("PhaseLayout: order outside [1,16]");
    if (wide_degrees < 0 || wide_degrees > 2 * order - 1)
      throw std::invalid_argument("PhaseLayout: wide degree count outside [0, 2o-1]");
  }

  static PhaseLayout all_double(int order) { return {order, 2 * order - 1}; }

  bool is_wide(int jx, int jv) const { return jx + jv < d; }
  int coeffs() const { return o * o; }
  int wide_count() const {
    int c = 0;
    for (int jx = 0; jx < o; ++jx)
      for (int jv = 0; jv < o; ++jv) c += is_wide(jx, jv);
    return c;
  }
  int narrow_count() const { return coeffs() - wide_count(); }

  bool operator==(PhaseLayout const&) const = default;
};

enum class Axis { x, v };

class PhaseSpaceGrid {
 public:
  PhaseSpaceGrid() = default;
  PhaseSpaceGrid(Domain1D dom_x, Domain1D dom_v, PhaseLayout layout)
      : dom_x_(dom_x), dom_v_(dom_v), layout_(layout) {
    int const o = layout.o;
    slot_.assign(o * o, 0);
    int wi = 0, ni = 0;
    for (int jx = 0; jx < o; ++jx)
      for (int jv = 0; jv < o; ++jv)
        slot_[jx * o + jv] = layout.is_wide(jx, jv) ? wi++ : ni++;
    nw_ = wi;
    nn_ = ni;
    wide_.assign(cells() * nw_, 0.0);
    narrow_.assign(cells() * nn_, 0.0f);
  }

  Domain1D const& dom_x() const { return dom_x_; }
  Domain1D const& dom_v() const { return dom_v_; }
  PhaseLayout const& layout() const { return layout_; }
  int order() const { return layout_.o; }
  std::size_t cells() const { return dom_x_.n * dom_v_.n; }
  std::size_t cell_index(std::size_t ix, std::size_t iv) const { return ix * dom_v_.n + iv; }
  std::size_t memory_bytes() const { return cells() * (8u * nw_ + 4u * nn_); }

  double coeff(std::size_t ix, std::size_t iv, int jx, int jv) const {
    int const o = layout_.o;
    std::size_t const c = cell_index(ix, iv);
    int const s = slot_[jx * o + jv];
    return layout_.is_wide(jx, jv) ? wide_[c * nw_ + s] : static_cast<double>(narrow_[c * nn_ + s]);
  }

  // out[jx * o + jv], promoted to 64-bit.
  void get_cell(std::size_t ix, std::size_t iv, double* out) const {
    int const o = layout_.o;
    std::size_t const c = cell_index(ix, iv);
    for (int jx = 0; jx < o; ++jx)
      for (int jv = 0; jv < o; ++jv) {
        int const s = slot_[jx * o + jv];
        out[jx * o + jv] = layout_.is_wide(jx, jv) ? wide_[c * nw_ + s]
                                                   : static_cast<double>(narrow_[c * nn_ + s]);
      }
  }

  // Stores in[jx * o + jv]; returns false if a narrow value overflows.
  bool set_cell_unchecked(std::size_t ix, std::size_t iv, double const* in) {
    int const o = layout_.o;
    std::size_t const c = cell_index(ix, iv);
    bool ok = true;
    for (int jx = 0; jx < o; ++jx)
      for (int jv = 0; jv < o; ++jv) {
        double const v = in[jx * o + jv];
        int const s = slot_[jx * o + jv];
        if (layout_.is_wide(jx, jv)) {
          ok = ok && std::isfinite(v);
          wide_[c * nw_ + s] = v;
        } else {
          ok = ok && detail::fits_float(v);
          narrow_[c * nn_ + s] = static_cast<float>(v);
        }
      }
    return ok;
  }

  void set_cell(std::size_t ix, std::size_t iv, double const* in) {
    if (ix >= dom_x_.n || iv >= dom_v_.n) throw std::invalid_argument("phase cell out of range");
    if (!set_cell_unchecked(ix, iv, in))
      throw std::invalid_argument("non-finite or out-of-range phase-space coefficient");
  }

  std::vector<double> const& wide() const { return wide_; }
  std::vector<float> const& narrow() const { return narrow_; }

  bool same_shape(PhaseSpaceGrid const& o) const {
    return dom_x_ == o.dom_x_ && dom_v_ == o.dom_v_ && layout_ == o.layout_;
  }

 private:
  Domain1D dom_x_{};
  Domain1D dom_v_{};
  PhaseLayout layout_{};
  std::vector<int> slot_;
  int nw_ = 0;
  int nn_ = 0;
  std::vector<double> wide_;
  std::vector<float> narrow_;
};

template <class F>
PhaseSpaceGrid project_function(F const& f, Domain1D const& dom_x, Domain1D const& dom_v,
                                PhaseLayout const& layout, int quad_n) {
  int const o = layout.o;
  if (quad_n < o) throw std::invalid_argument("project_function: quadrature nodes below order");
  auto const rule = gauss_legendre_rule(quad_n);
  std::size_t const nq = rule.n();
  std::vector<double> p(nq * o);
  for (std::size_t q = 0; q < nq; ++q) legendre_eval_all(o - 1, rule.nodes[q], p.data() + q * o);
  PhaseSpaceGrid grid(dom_x, dom_v, layout);
  std::vector<double> c(o * o);
  for (std::size_t ix = 0; ix < dom_x.n; ++ix)
    for (std::size_t iv = 0; iv < dom_v.n; ++iv) {
      std::fill(c.begin(), c.end(), 0.0);
      for (std::size_t qx = 0; qx < nq; ++qx) {
        double const x = dom_x.center(ix) + 0.5 * dom_x.h() * rule.nodes[qx];
        for (std::size_t qv = 0; qv < nq; ++qv) {
          double const v = dom_v.center(iv) + 0.5 * dom_v.h() * rule.nodes[qv];
          double const w = rule.weights[qx] * rule.weights[qv] * f(x, v);
          for (int jx = 0; jx < o; ++jx)
            for (int jv = 0; jv < o; ++jv) c[jx * o + jv] += w * p[qx * o + jx] * p[qv * o + jv];
        }
      }
      for (int jx = 0; jx < o; ++jx)
        for (int jv = 0; jv < o; ++jv) c[jx * o + jv] *= 0.25 * (2 * jx + 1) * (2 * jv + 1);
      grid.set_cell(ix, iv, c.data());
    }
  return grid;
}

template <class F>
PhaseSpaceGrid project_function(F const& f, Domain1D const& dom_x, Domain1D const& dom_v,
                                PhaseLayout const& layout) {
  return project_function(f, dom_x, dom_v, layout, default_quadrature_nodes(layout.o));
}

inline double evaluate(PhaseSpaceGrid const& g, double x, double v) {
  double xi = 0.0, eta = 0.0;
  std::size_t const ix = g.dom_x().locate(x, xi);
  std::size_t const iv = g.dom_v().locate(v, eta);
  int const o = g.order();
  double px[16], pv[16];
  legendre_eval_all(o - 1, xi, px);
  legendre_eval_all(o - 1, eta, pv);
  double u = 0.0;
  for (int jx = 0; jx < o; ++jx)
    for (int jv = 0; jv < o; ++jv) u += g.coeff(ix, iv, jx, jv) * px[jx] * pv[jv];
  return u;
}

inline double total_mass(PhaseSpaceGrid const& g) {
  std::size_t const nv = g.dom_v().n;
  double const s = pairwise_sum(0, g.cells(), [&](std::size_t c) {
    return g.coeff(c / nv, c % nv, 0, 0);
  });
  return g.dom_x().h() * g.dom_v().h() * s;
}

inline double l2_norm(PhaseSpaceGrid const& g) {
  std::size_t const nv = g.dom_v().n;
  int const o = g.order();
  double const s = pairwise_sum(0, g.cells(), [&](std::size_t c) {
    double acc = 0.0;
    for (int jx = 0; jx < o; ++jx)
      for (int jv = 0; jv < o; ++jv) {
        double const v = g.coeff(c / nv, c % nv, jx, jv);
        acc += v * v / ((2 * jx + 1) * (2 * jv + 1));
      }
    return acc;
  });
  return std::sqrt(g.dom_x().h() * g.dom_v().h() * s);
}

// Number of 1D lines a sweep along `axis` works on: o Gauss-node lines per
// perpendicular cell.
inline std::size_t line_count(PhaseSpaceGrid const& g, Axis axis) {
  return (axis == Axis::x ? g.dom_v().n : g.dom_x().n) * static_cast<std::size_t>(g.order());
}

namespace detail {

inline std::uint64_t bits_of(double a) {
  std::uint64_t b;
  std::memcpy(&b, &a, sizeof b);
  return b;
}

}  // namespace detail

// Advects every line along `axis` with its own CFL number.
//
// nus has either one entry per perpendicular cell (the whole cell moves
// with one speed, advected mode by mode) or one entry per Gauss-node line,
// entry k*o + q for perpendicular cell k and node q. In the second case
// each cell's perpendicular dependence is transformed to nodal values,
// every nodal line is advected with its own speed and the result is
// projected back. Cells whose node speeds coincide take the modal path.
inline void advect_rows(PhaseSpaceGrid const& src, std::span<double const> nus, Axis axis,
                        PhaseSpaceGrid& dst) {
  if (&src == &dst) throw std::invalid_argument("advect_rows: source and destination alias");
  if (!src.same_shape(dst)) throw std::invalid_argument("advect_rows: grid shape mismatch");
  int const o = src.order();
  bool const along_x = axis == Axis::x;
  std::size_t const n_line = along_x ? src.dom_x().n : src.dom_v().n;
  std::size_t const n_perp = along_x ? src.dom_v().n : src.dom_x().n;
  bool per_node = false;
  if (nus.size() == n_perp * o && o > 1)
    per_node = true;
  else if (nus.size() != n_perp)
    throw std::invalid_argument("advect_rows: expected " + std::to_string(n_perp) + " or " +
                                std::to_string(n_perp * o) + " CFL numbers, got " +
                                std::to_string(nus.size()));

  // matrices shared read-only across lines, keyed by the exact alpha bits
  std::map<std::uint64_t, ShiftMatrices> cache;
  std::vector<ShiftDecomposition> shifts(nus.size());
  for (std::size_t k = 0; k < nus.size(); ++k) {
    shifts[k] = shift_decompose(nus[k]);
    auto const key = detail::bits_of(shifts[k].alpha);
    if (!cache.contains(key)) cache.emplace(key, compute_shift_matrices(shifts[k].alpha, o));
  }
  std::vector<ShiftMatrices const*> mats(nus.size());
  for (std::size_t k = 0; k < nus.size(); ++k)
    mats[k] = &cache.at(detail::bits_of(shifts[k].alpha));

  auto const rule = gauss_legendre_rule(o);
  std::vector<double> pq(static_cast<std::size_t>(o) * o);  // pq[q*o + b] = P_b(node q)
  for (int q = 0; q < o; ++q) legendre_eval_all(o - 1, rule.nodes[q], pq.data() + q * o);

  bool ok = true;
  auto const np = static_cast<std::int64_t>(n_perp);
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (std::int64_t kk = 0; kk < np; ++kk) {
    auto const k = static_cast<std::size_t>(kk);
    // lines[b][i*o + a]: along-axis cell i, along coefficient a, perpendicular index b
    std::vector<double> cell(o * o);
    std::vector<double> lines(static_cast<std::size_t>(o) * n_line * o);
    std::vector<double> moved(lines.size());
    auto at = [&](std::vector<double>& buf, int b, std::size_t i, int a) -> double& {
      return buf[(static_cast<std::size_t>(b) * n_line + i) * o + a];
    };
    for (std::size_t i = 0; i < n_line; ++i) {
      if (along_x)
        src.get_cell(i, k, cell.data());
      else
        src.get_cell(k, i, cell.data());
      for (int a = 0; a < o; ++a)
        for (int b = 0; b < o; ++b)
          at(lines, b, i, a) = along_x ? cell[a * o + b] : cell[b * o + a];
    }

    bool nodal = false;
    if (per_node)
      for (int q = 1; q < o; ++q)
        nodal = nodal || detail::bits_of(nus[k * o + q]) != detail::bits_of(nus[k * o]);

    if (!nodal) {
      std::size_t const idx = per_node ? k * o : k;
      for (int b = 0; b < o; ++b)
        advect_line(&at(lines, b, 0, 0), &at(moved, b, 0, 0), n_line, o, shifts[idx], *mats[idx]);
    } else {
      // modal -> nodal in the perpendicular direction
      std::vector<double> nodes(lines.size(), 0.0);
      for (int q = 0; q < o; ++q)
        for (std::size_t i = 0; i < n_line; ++i)
          for (int a = 0; a < o; ++a) {
            double s = 0.0;
            for (int b = 0; b < o; ++b) s += at(lines, b, i, a) * pq[q * o + b];
            at(nodes, q, i, a) = s;
          }
      for (int q = 0; q < o; ++q) {
        std::size_t const idx = k * o + q;
        advect_line(&at(nodes, q, 0, 0), &at(lines, q, 0, 0), n_line, o, shifts[idx],
                    *mats[idx]);
      }
      // nodal -> modal
      for (int b = 0; b < o; ++b)
        for (std::size_t i = 0; i < n_line; ++i)
          for (int a = 0; a < o; ++a) {
            double s = 0.0;
            for (int q = 0; q < o; ++q) s += rule.weights[q] * at(lines, q, i, a) * pq[q * o + b];
            at(moved, b, i, a) = 0.5 * (2 * b + 1) * s;
          }
    }

    bool line_ok = true;
    for (std::size_t i = 0; i < n_line; ++i) {
      for (int a = 0; a < o; ++a)
        for (int b = 0; b < o; ++b)
          (along_x ? cell[a * o + b] : cell[b * o + a]) = at(moved, b, i, a);
      bool const c_ok = along_x ? dst.set_cell_unchecked(i, k, cell.data())
                                : dst.set_cell_unchecked(k, i, cell.data());
      line_ok = line_ok && c_ok;
    }
    ok = ok && line_ok;
  }
  if (!ok) throw std::invalid_argument("advect_rows: coefficient overflows 32-bit storage");
}

}  // namespace sldg
