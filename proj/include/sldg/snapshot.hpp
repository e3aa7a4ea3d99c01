#pragma once

// Grid snapshot files.
//
// Layout (all little-endian):
//   bytes  0..7   magic "SLDG1" padded with NUL to 8 bytes
//   bytes  8..15  N      (uint64)
//   bytes 16..23  o      (uint64)
//   bytes 24..31  d      (uint64)
//   bytes 32..39  x_min  (float64)
//   bytes 40..47  x_max  (float64)
//   then N*d float64 (wide buffer), then N*(o-d) float32 (narrow buffer).

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mixed_storage.hpp"

namespace sldg {

inline constexpr std::array<char, 8> snapshot_magic{'S', 'L', 'D', 'G', '1', 0, 0, 0};

namespace detail {

template <class T>
void put_le(std::ostream& os, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t k = 0; k < sizeof(T) / 2; ++k) std::swap(b[k], b[sizeof(T) - 1 - k]);
  os.write(reinterpret_cast<char const*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char b[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(b), sizeof(T)))
    throw std::runtime_error("snapshot: truncated input");
  if constexpr (std::endian::native == std::endian::big)
    for (std::size_t k = 0; k < sizeof(T) / 2; ++k) std::swap(b[k], b[sizeof(T) - 1 - k]);
  T value;
  std::memcpy(&value, b, sizeof(T));
  return value;
}

}  // namespace detail

inline void write_snapshot(std::ostream& os, CoefficientGrid const& grid) {
  os.write(snapshot_magic.data(), snapshot_magic.size());
  auto const& dom = grid.domain();
  auto const& lay = grid.layout();
  detail::put_le<std::uint64_t>(os, dom.n);
  detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(lay.o));
  detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(lay.d));
  detail::put_le(os, dom.x_min);
  detail::put_le(os, dom.x_max);
  for (double v : grid.wide()) detail::put_le(os, v);
  for (float v : grid.narrow()) detail::put_le(os, v);
  if (!os) throw std::runtime_error("snapshot: write failed");
}

inline CoefficientGrid read_snapshot(std::istream& is) {
  std::array<char, 8> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != snapshot_magic)
    throw std::runtime_error("snapshot: bad magic");
  auto const n = detail::get_le<std::uint64_t>(is);
  auto const o = detail::get_le<std::uint64_t>(is);
  auto const d = detail::get_le<std::uint64_t>(is);
  auto const x_min = detail::get_le<double>(is);
  auto const x_max = detail::get_le<double>(is);
  if (o < 1 || o > 64 || d > o || n < 1) throw std::runtime_error("snapshot: bad header");
  CoefficientGrid grid(Domain1D(x_min, x_max, n),
                       PrecisionLayout(static_cast<int>(o), static_cast<int>(d)));
  for (double& v : grid.wide()) v = detail::get_le<double>(is);
  for (float& v : grid.narrow()) v = detail::get_le<float>(is);
  return grid;
}

inline void write_snapshot(std::string const& path, CoefficientGrid const& grid) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path);
  write_snapshot(os, grid);
}

inline CoefficientGrid read_snapshot(std::string const& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path);
  return read_snapshot(is);
}

inline std::string snapshot_bytes(CoefficientGrid const& grid) {
  std::ostringstream os(std::ios::binary);
  write_snapshot(os, grid);
  return os.str();
}

}  // namespace sldg
