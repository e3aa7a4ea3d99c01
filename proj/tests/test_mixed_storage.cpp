#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include <sldg/mixed_storage.hpp>
#include <sldg/snapshot.hpp>

using namespace sldg;

namespace {

template <class T>
bool same_bits(std::span<T const> a, std::span<T const> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size_bytes()) == 0;
}

}  // namespace

TEST_CASE("byte accounting", "[storage]") {
  Domain1D const dom(0, 1, 10);
  CHECK(new_grid(dom, PrecisionLayout(4, 1)).memory_bytes() == 200);
  CHECK(new_grid(dom, PrecisionLayout(2, 2)).memory_bytes() == 160);
  CHECK(new_grid(dom, PrecisionLayout(2, 0)).memory_bytes() == 80);

  CHECK(memorydown(PrecisionLayout(4, 1)) == 1.6);
  CHECK(memorydown(PrecisionLayout(2, 1)) == 16.0 / 12.0);
  CHECK(memorydown(PrecisionLayout(4, 0)) == 2.0);
  CHECK(memorydown(PrecisionLayout(4, 4)) == 1.0);

  auto g = new_grid(dom, PrecisionLayout(3, 1));
  for (double v : g.wide()) CHECK(v == 0.0);
  for (float v : g.narrow()) CHECK(v == 0.0f);

  CHECK_THROWS_AS(PrecisionLayout(0, 0), std::invalid_argument);
  CHECK_THROWS_AS(PrecisionLayout(2, 3), std::invalid_argument);
  CHECK_THROWS_AS(PrecisionLayout(2, -1), std::invalid_argument);
}

TEST_CASE("cell access and narrowing", "[storage]") {
  Domain1D const dom(0, 1, 3);

  SECTION("all 64-bit round trip is exact") {
    CoefficientGrid g(dom, PrecisionLayout(3, 3));
    std::vector<double> const v{0.1, -1.0 / 3.0, 1e-300};
    g.set_cell(1, v);
    CHECK(g.get_cell(1) == v);
  }

  SECTION("narrow slot rounds to nearest float") {
    CoefficientGrid g(dom, PrecisionLayout(2, 1));
    g.set_cell(0, std::vector<double>{0.1, 0.1});
    auto const c = g.get_cell(0);
    CHECK(c[0] == 0.1);
    CHECK(c[1] == static_cast<double>(0.1f));
    CHECK(c[1] != 0.1);
    CHECK(std::abs(c[1] - 0.1) <= 0.1 * std::ldexp(1.0, -23));
  }

  SECTION("zeros") {
    CoefficientGrid g(dom, PrecisionLayout(4, 2));
    g.set_cell(2, std::vector<double>(4, 0.0));
    for (double v : g.wide()) CHECK(v == 0.0);
    for (float v : g.narrow()) CHECK(v == 0.0f);
  }

  SECTION("overflow and non-finite input are rejected") {
    CoefficientGrid g(dom, PrecisionLayout(2, 1));
    CHECK_THROWS_AS(g.set_cell(0, std::vector<double>{1.0, 1e39}), std::invalid_argument);
    CHECK_NOTHROW(g.set_cell(0, std::vector<double>{1e39, 1.0}));  // wide slot holds it
    CHECK_THROWS_AS(g.set_cell(0, std::vector<double>{NAN, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(g.set_cell(0, std::vector<double>{1.0, INFINITY}), std::invalid_argument);
    // a rejected write leaves the cell untouched
    CHECK(g.get_cell(0) == std::vector<double>{1e39, 1.0});
  }

  SECTION("underflow below the smallest subnormal") {
    CoefficientGrid g(dom, PrecisionLayout(2, 1));
    double const tiny = std::ldexp(1.0, -150);  // half of 2^-149: ties to even, i.e. zero
    g.set_cell(0, std::vector<double>{0.0, tiny});
    CHECK(g.get_cell(0)[1] == 0.0);
    double const above = std::ldexp(1.5, -150);
    g.set_cell(0, std::vector<double>{0.0, above});
    CHECK(g.get_cell(0)[1] == std::ldexp(1.0, -149));
    auto const before = std::vector<float>(g.narrow().begin(), g.narrow().end());
    g.set_cell(0, g.get_cell(0));
    CHECK(same_bits<float>(before, g.narrow()));
  }

  SECTION("index and size checks") {
    CoefficientGrid g(dom, PrecisionLayout(2, 1));
    CHECK_THROWS_AS(g.get_cell(3), std::invalid_argument);
    CHECK_THROWS_AS(g.set_cell(3, std::vector<double>{1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(g.set_cell(0, std::vector<double>{1, 2, 3}), std::invalid_argument);
  }
}

TEST_CASE("storage is stable under set/get round trips", "[storage][property]") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-140, 120);
  std::uniform_int_distribution<int> order(1, 8);
  for (int trial = 0; trial < 500; ++trial) {
    int const o = order(rng);
    std::uniform_int_distribution<int> dd(0, o);
    PrecisionLayout const lay(o, dd(rng));
    CoefficientGrid g(Domain1D(0, 1, 4), lay);
    std::vector<double> v(o);
    for (double& x : v) x = std::ldexp(mant(rng), expo(rng));
    std::size_t const cell = trial % 4;
    g.set_cell(cell, v);
    auto const w1 = std::vector<double>(g.wide().begin(), g.wide().end());
    auto const n1 = std::vector<float>(g.narrow().begin(), g.narrow().end());
    auto const read = g.get_cell(cell);
    for (int j = 0; j < lay.d; ++j) CHECK(read[j] == v[j]);
    for (int j = lay.d; j < o; ++j)
      CHECK(read[j] == static_cast<double>(static_cast<float>(v[j])));
    g.set_cell(cell, read);
    CHECK(same_bits<double>(w1, g.wide()));
    CHECK(same_bits<float>(n1, g.narrow()));
  }
}

TEST_CASE("every float promotes exactly", "[storage][property]") {
  std::mt19937 rng(99);
  for (int k = 0; k < 100000; ++k) {
    std::uint32_t bits = rng();
    float f;
    std::memcpy(&f, &bits, sizeof f);
    if (!std::isfinite(f)) continue;
    CHECK(static_cast<float>(static_cast<double>(f)) == f);
  }
}

TEST_CASE("snapshot write-read-write is byte identical", "[snapshot]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (auto [o, d] : {std::pair{4, 1}, {2, 2}, {2, 0}, {5, 3}}) {
    CoefficientGrid g(Domain1D(-0.5, 1.75, 13), PrecisionLayout(o, d));
    std::vector<double> v(o);
    for (std::size_t i = 0; i < 13; ++i) {
      for (double& x : v) x = u(rng);
      g.set_cell(i, v);
    }
    auto const bytes = snapshot_bytes(g);
    CHECK(bytes.size() == 48 + g.memory_bytes());
    CHECK(bytes.substr(0, 5) == "SLDG1");
    std::istringstream in(bytes, std::ios::binary);
    auto const back = read_snapshot(in);
    CHECK(back.domain() == g.domain());
    CHECK(back.layout() == g.layout());
    CHECK(snapshot_bytes(back) == bytes);
  }
}

TEST_CASE("snapshot header is little-endian", "[snapshot]") {
  CoefficientGrid g(Domain1D(0.0, 1.0, 2), PrecisionLayout(2, 1));
  g.set_cell(0, std::vector<double>{1.0, 0.5});
  auto const b = snapshot_bytes(g);
  CHECK(static_cast<unsigned char>(b[8]) == 2);   // N
  CHECK(static_cast<unsigned char>(b[16]) == 2);  // o
  CHECK(static_cast<unsigned char>(b[24]) == 1);  // d
  // x_max = 1.0 -> 0x3FF0000000000000
  CHECK(static_cast<unsigned char>(b[47]) == 0x3F);
  CHECK(static_cast<unsigned char>(b[46]) == 0xF0);
  // first wide value 1.0 at offset 48
  CHECK(static_cast<unsigned char>(b[55]) == 0x3F);
  // first narrow value 0.5f = 0x3F000000 after the 2 wide values
  CHECK(static_cast<unsigned char>(b[64 + 3]) == 0x3F);

  std::istringstream bad(std::string("NOTSLDG") + std::string(60, '\0'));
  CHECK_THROWS_AS(read_snapshot(bad), std::runtime_error);
  std::istringstream truncated(b.substr(0, 50));
  CHECK_THROWS_AS(read_snapshot(truncated), std::runtime_error);
}
