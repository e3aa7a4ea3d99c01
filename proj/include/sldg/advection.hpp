#pragma once

// Semi-Lagrangian DG step for u_t + a u_x = 0 on a periodic CoefficientGrid.
//
// The step reads two source cells per destination cell, does all arithmetic
// in 64-bit and narrows only when storing. Work is partitioned over
// destination cells, so the result is independent of the thread count.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <utility>

#include "mixed_storage.hpp"
#include "shift.hpp"

namespace sldg {

enum class Kernel { specialized, generic };

inline std::string_view kernel_name(Kernel k) {
  return k == Kernel::specialized ? "specialized" : "generic";
}

inline Kernel parse_kernel(std::string_view s) {
  if (s == "specialized") return Kernel::specialized;
  if (s == "generic") return Kernel::generic;
  throw std::invalid_argument("unknown kernel '" + std::string(s) + "'");
}

// Largest order with a compile-time kernel.
inline constexpr int max_specialized_order = 6;

namespace detail {

// Source index offset: destination i reads cells (i - shift - 1) and (i - shift) mod n.
inline std::size_t wrap_shift(std::int64_t i_star, std::size_t n) {
  auto const nn = static_cast<std::int64_t>(n);
  std::int64_t s = i_star % nn;
  if (s < 0) s += nn;
  return static_cast<std::size_t>(s);
}

inline std::size_t near_source(std::size_t i, std::size_t shift, std::size_t n) {
  return i >= shift ? i - shift : i + n - shift;
}

inline bool fits_float(double v) {
  return std::abs(v) <= static_cast<double>(std::numeric_limits<float>::max());
}

template <int O, int D>
bool step_fixed(double const* __restrict sw, float const* __restrict sn, double* __restrict dw,
                float* __restrict dn, std::size_t n, std::size_t shift,
                ShiftMatrices const& m) {
  constexpr int R = O - D;
  double A[O][O], B[O][O];
  for (int j = 0; j < O; ++j)
    for (int l = 0; l < O; ++l) {
      A[j][l] = m.A[j * O + l];
      B[j][l] = m.B[j * O + l];
    }
  bool ok = true;
  auto const sn_ = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (std::int64_t ii = 0; ii < sn_; ++ii) {
    auto const i = static_cast<std::size_t>(ii);
    std::size_t const k2 = near_source(i, shift, n);
    std::size_t const k1 = k2 == 0 ? n - 1 : k2 - 1;
    double far[O], near[O];
    for (int l = 0; l < D; ++l) {
      far[l] = sw[k1 * D + l];
      near[l] = sw[k2 * D + l];
    }
    for (int l = 0; l < R; ++l) {
      far[D + l] = static_cast<double>(sn[k1 * R + l]);
      near[D + l] = static_cast<double>(sn[k2 * R + l]);
    }
    double out[O];
    for (int j = 0; j < O; ++j) {
      double acc = 0.0;
      for (int l = 0; l < O; ++l) acc += A[j][l] * far[l];
      for (int l = 0; l < O; ++l) acc += B[j][l] * near[l];
      out[j] = acc;
    }
    for (int j = 0; j < D; ++j) dw[i * D + j] = out[j];
    bool cell_ok = true;
    for (int j = 0; j < R; ++j) {
      cell_ok = cell_ok && fits_float(out[D + j]);
      dn[i * R + j] = static_cast<float>(out[D + j]);
    }
    ok = ok && cell_ok;
  }
  return ok;
}

inline bool step_generic(double const* sw, float const* sn, double* dw, float* dn, std::size_t n,
                         std::size_t shift, ShiftMatrices const& m, int d) {
  int const o = m.o;
  int const r = o - d;
  double const* A = m.A.data();
  double const* B = m.B.data();
  bool ok = true;
  auto const sn_ = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (std::int64_t ii = 0; ii < sn_; ++ii) {
    auto const i = static_cast<std::size_t>(ii);
    std::size_t const k2 = near_source(i, shift, n);
    std::size_t const k1 = k2 == 0 ? n - 1 : k2 - 1;
    double far[64], near[64];
    for (int l = 0; l < d; ++l) {
      far[l] = sw[k1 * d + l];
      near[l] = sw[k2 * d + l];
    }
    for (int l = 0; l < r; ++l) {
      far[d + l] = static_cast<double>(sn[k1 * r + l]);
      near[d + l] = static_cast<double>(sn[k2 * r + l]);
    }
    bool cell_ok = true;
    for (int j = 0; j < o; ++j) {
      double acc = 0.0;
      for (int l = 0; l < o; ++l) acc += A[j * o + l] * far[l];
      for (int l = 0; l < o; ++l) acc += B[j * o + l] * near[l];
      if (j < d) {
        dw[i * d + j] = acc;
      } else {
        cell_ok = cell_ok && fits_float(acc);
        dn[i * r + (j - d)] = static_cast<float>(acc);
      }
    }
    ok = ok && cell_ok;
  }
  return ok;
}

using FixedStep = bool (*)(double const*, float const*, double*, float*, std::size_t, std::size_t,
                           ShiftMatrices const&);

template <int O, int... Ds>
constexpr FixedStep pick_d(int d, std::integer_sequence<int, Ds...>) {
  FixedStep f = nullptr;
  ((d == Ds ? (f = &step_fixed<O, Ds>, 0) : 0), ...);
  return f;
}

template <int... Os>
constexpr FixedStep pick(int o, int d, std::integer_sequence<int, Os...>) {
  FixedStep f = nullptr;
  ((o == Os + 1 ? (f = pick_d<Os + 1>(d, std::make_integer_sequence<int, Os + 2>{}), 0) : 0),
   ...);
  return f;
}

inline FixedStep fixed_step_for(PrecisionLayout const& l) {
  if (l.o < 1 || l.o > max_specialized_order) return nullptr;
  return pick(l.o, l.d, std::make_integer_sequence<int, max_specialized_order>{});
}

}  // namespace detail

inline bool has_specialized_kernel(PrecisionLayout const& l) {
  return detail::fixed_step_for(l) != nullptr;
}

// One step with precomputed matrices. Returns the kernel that ran.
inline Kernel advect_with(CoefficientGrid const& src, ShiftDecomposition const& shift,
                          ShiftMatrices const& m, CoefficientGrid& dst,
                          Kernel requested = Kernel::specialized) {
  if (&src == &dst) throw std::invalid_argument("advect: source and destination alias");
  if (!src.same_shape(dst)) throw std::invalid_argument("advect: grid shape mismatch");
  if (m.o != src.order()) throw std::invalid_argument("advect: matrix order mismatch");
  std::size_t const n = src.cells();
  int const d = src.layout().d, r = src.layout().narrow();
  std::size_t const s = detail::wrap_shift(shift.i_star, n);

  if (shift.alpha == 0.0) {
    // integer shift: cell permutation, bit-exact
    auto sw = src.wide();
    auto sn = src.narrow();
    auto dw = dst.wide();
    auto dn = dst.narrow();
    auto const sn_ = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < sn_; ++ii) {
      auto const i = static_cast<std::size_t>(ii);
      std::size_t const k = detail::near_source(i, s, n);
      if (d > 0) std::memcpy(&dw[i * d], &sw[k * d], sizeof(double) * d);
      if (r > 0) std::memcpy(&dn[i * r], &sn[k * r], sizeof(float) * r);
    }
    return requested;
  }

  Kernel used = Kernel::generic;
  bool ok = false;
  auto const fixed = requested == Kernel::specialized ? detail::fixed_step_for(src.layout())
                                                      : nullptr;
  if (fixed) {
    used = Kernel::specialized;
    ok = fixed(src.wide().data(), src.narrow().data(), dst.wide().data(), dst.narrow().data(), n,
               s, m);
  } else {
    ok = detail::step_generic(src.wide().data(), src.narrow().data(), dst.wide().data(),
                              dst.narrow().data(), n, s, m, d);
  }
  if (!ok) throw std::invalid_argument("advect: coefficient overflows 32-bit storage");
  return used;
}

// Advect src by CFL number nu (shift of nu cells) into dst.
inline Kernel advect_constant(CoefficientGrid const& src, double nu, CoefficientGrid& dst,
                              Kernel requested = Kernel::specialized) {
  auto const shift = shift_decompose(nu);
  auto const m = compute_shift_matrices(shift.alpha, src.order());
  return advect_with(src, shift, m, dst, requested);
}

// Repeated steps with double buffering; the result ends in `grid`.
inline void advect_steps(CoefficientGrid& grid, double nu, std::size_t steps,
                         Kernel requested = Kernel::specialized) {
  if (steps == 0) return;
  auto const shift = shift_decompose(nu);
  auto const m = compute_shift_matrices(shift.alpha, grid.order());
  CoefficientGrid other(grid.domain(), grid.layout());
  for (std::size_t k = 0; k < steps; ++k) {
    advect_with(grid, shift, m, other, requested);
    std::swap(grid, other);
  }
}

// 64-bit line update used by the phase-space sweeps: src and dst hold n
// cells of o contiguous coefficients each.
inline void advect_line(double const* src, double* dst, std::size_t n, int o,
                        ShiftDecomposition const& shift, ShiftMatrices const& m) {
  std::size_t const s = detail::wrap_shift(shift.i_star, n);
  if (shift.alpha == 0.0) {
    for (std::size_t i = 0; i < n; ++i)
      std::memcpy(dst + i * o, src + detail::near_source(i, s, n) * o, sizeof(double) * o);
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t const k2 = detail::near_source(i, s, n);
    std::size_t const k1 = k2 == 0 ? n - 1 : k2 - 1;
    double const* far = src + k1 * o;
    double const* near = src + k2 * o;
    for (int j = 0; j < o; ++j) {
      double acc = 0.0;
      for (int l = 0; l < o; ++l) acc += m.A[j * o + l] * far[l];
      for (int l = 0; l < o; ++l) acc += m.B[j * o + l] * near[l];
      dst[i * o + j] = acc;
    }
  }
}

}  // namespace sldg
