#pragma once

// Mixed-precision Legendre coefficient storage. Per cell, coefficients
// j < d live in a 64-bit buffer and j >= d in a 32-bit buffer; both
// buffers are cell-major.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "legendre.hpp"

namespace sldg {

struct PrecisionLayout {
  int o = 1;  // coefficients per cell (degree + 1)
  int d = 1;  // leading coefficients kept in 64-bit

  PrecisionLayout() = default;
  PrecisionLayout(int order, int n_double) : o(order), d(n_double) {
    if (order < 1) throw std::invalid_argument("PrecisionLayout: order must be >= 1");
    if (n_double < 0 || n_double > order)
      throw std::invalid_argument("PrecisionLayout: n_double must lie in [0, order]");
  }

  int narrow() const { return o - d; }
  std::size_t bytes_per_cell() const { return 8u * d + 4u * (o - d); }

  bool operator==(PrecisionLayout const&) const = default;
};

// Memory reduction of the all-64-bit layout relative to this one.
inline double memorydown(PrecisionLayout const& l) {
  return 8.0 * l.o / static_cast<double>(l.bytes_per_cell());
}

// Narrowing used by every 32-bit store: round-to-nearest-even, with
// overflow and non-finite input reported instead of producing Inf.
inline float narrow_checked(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite coefficient");
  auto const f = static_cast<float>(v);
  if (std::isinf(f))
    throw std::invalid_argument("coefficient " + std::to_string(v) +
                                " overflows 32-bit storage");
  return f;
}

class CoefficientGrid {
 public:
  CoefficientGrid() = default;
  CoefficientGrid(Domain1D dom, PrecisionLayout layout)
      : dom_(dom),
        layout_(layout),
        wide_(dom.n * static_cast<std::size_t>(layout.d), 0.0),
        narrow_(dom.n * static_cast<std::size_t>(layout.narrow()), 0.0f) {}

  Domain1D const& domain() const { return dom_; }
  PrecisionLayout const& layout() const { return layout_; }
  std::size_t cells() const { return dom_.n; }
  int order() const { return layout_.o; }

  std::size_t memory_bytes() const { return dom_.n * layout_.bytes_per_cell(); }

  // Promotes cell i into out[0..o).
  void get_cell(std::size_t i, std::span<double> out) const {
    check_index(i, out.size());
    int const d = layout_.d, r = layout_.narrow();
    double const* w = wide_.data() + i * d;
    float const* s = narrow_.data() + i * r;
    for (int j = 0; j < d; ++j) out[j] = w[j];
    for (int j = 0; j < r; ++j) out[d + j] = static_cast<double>(s[j]);
  }

  std::vector<double> get_cell(std::size_t i) const {
    std::vector<double> v(layout_.o);
    get_cell(i, v);
    return v;
  }

  void set_cell(std::size_t i, std::span<double const> values) {
    check_index(i, values.size());
    int const d = layout_.d, r = layout_.narrow();
    for (int j = 0; j < d; ++j)
      if (!std::isfinite(values[j])) throw std::invalid_argument("non-finite coefficient");
    float tmp[64];
    for (int j = 0; j < r; ++j) tmp[j] = narrow_checked(values[d + j]);
    double* w = wide_.data() + i * d;
    float* s = narrow_.data() + i * r;
    for (int j = 0; j < d; ++j) w[j] = values[j];
    for (int j = 0; j < r; ++j) s[j] = tmp[j];
  }

  // Single coefficient access, promoted.
  double coeff(std::size_t i, int j) const {
    return j < layout_.d ? wide_[i * layout_.d + j]
                         : static_cast<double>(narrow_[i * layout_.narrow() + (j - layout_.d)]);
  }

  std::span<double> wide() { return wide_; }
  std::span<double const> wide() const { return wide_; }
  std::span<float> narrow() { return narrow_; }
  std::span<float const> narrow() const { return narrow_; }

  bool same_shape(CoefficientGrid const& other) const {
    return dom_ == other.dom_ && layout_ == other.layout_;
  }

  bool operator==(CoefficientGrid const&) const = default;

 private:
  void check_index(std::size_t i, std::size_t count) const {
    if (i >= dom_.n)
      throw std::invalid_argument("cell index " + std::to_string(i) + " out of range");
    if (count != static_cast<std::size_t>(layout_.o))
      throw std::invalid_argument("cell value count does not match order");
    if (layout_.o > 64) throw std::invalid_argument("order above 64 unsupported");
  }

  Domain1D dom_{};
  PrecisionLayout layout_{};
  std::vector<double> wide_;
  std::vector<float> narrow_;
};

inline CoefficientGrid new_grid(Domain1D dom, PrecisionLayout layout) {
  return CoefficientGrid(dom, layout);
}

}  // namespace sldg
