#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "gripsim/kernels.hpp"

using namespace gripsim::kernels;

namespace {

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Avx2, Isa::Neon})
    if (isa_available(isa)) out.push_back(isa);
  return out;
}

Moments run(Isa isa, std::span<const double> x) { return moments(isa, x); }

double run_dev(Isa isa, std::span<const double> x, double c) {
  return squared_deviation(isa, x, c);
}

}  // namespace

TEST_CASE("scalar reference on small inputs") {
  const std::vector<double> x = {1.0, -2.0, 3.0};
  const Moments m = scalar::moments(x);
  CHECK(m.sum == 2.0);
  CHECK(m.sum_abs == 6.0);
  CHECK(m.sum_sq == 14.0);
  CHECK(scalar::squared_deviation(x, 1.0) == 0.0 + 9.0 + 4.0);
  const Moments empty = scalar::moments({});
  CHECK(empty.sum == 0.0);
  CHECK(empty.sum_sq == 0.0);
}

TEST_CASE("vector kernels are exact on integer data") {
  // Integer-valued samples sum exactly in any order.
  std::mt19937_64 rng(5);
  for (Isa isa : vector_isas()) {
    for (std::size_t n : {0, 1, 3, 4, 7, 8, 9, 15, 16, 17, 100, 1001}) {
      std::vector<double> x(n);
      for (double& v : x) v = static_cast<double>(static_cast<int>(rng() % 2001) - 1000);
      const Moments a = scalar::moments(x), b = run(isa, x);
      CHECK(a.sum == b.sum);
      CHECK(a.sum_abs == b.sum_abs);
      CHECK(a.sum_sq == b.sum_sq);
      CHECK(scalar::squared_deviation(x, 3.0) == run_dev(isa, x, 3.0));
    }
  }
}

TEST_CASE("vector kernels match the scalar reference on random data") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(5.0, 80.0);
  for (Isa isa : vector_isas()) {
    CAPTURE(to_string(isa));
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<double> x(rng() % 3000);
      for (double& v : x) v = noise(rng);
      const Moments a = scalar::moments(x), b = run(isa, x);
      const double scale = a.sum_abs + 1e-300;
      REQUIRE(std::abs(a.sum - b.sum) <= 1e-12 * scale);
      REQUIRE(std::abs(a.sum_abs - b.sum_abs) <= 1e-12 * scale);
      REQUIRE(std::abs(a.sum_sq - b.sum_sq) <= 1e-12 * (a.sum_sq + 1e-300));
      const double c = x.empty() ? 0.0 : a.sum / static_cast<double>(x.size());
      const double da = scalar::squared_deviation(x, c), db = run_dev(isa, x, c);
      REQUIRE(std::abs(da - db) <= 1e-12 * (da + 1e-300));
    }
  }
}

TEST_CASE("unaligned views") {
  std::vector<double> buf(1037);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = std::sin(static_cast<double>(i));
  for (Isa isa : vector_isas()) {
    for (std::size_t off = 0; off < 5; ++off) {
      const std::span<const double> x = std::span<const double>(buf).subspan(off, 1000);
      const Moments a = scalar::moments(x), b = run(isa, x);
      CHECK(a.sum_sq == doctest::Approx(b.sum_sq).epsilon(1e-13));
    }
  }
}

TEST_CASE("dispatch") {
  CHECK(isa_available(Isa::Scalar));
  CHECK(parse_isa("avx2") == Isa::Avx2);
  CHECK_FALSE(parse_isa("sse9").has_value());
  const Isa before = active_isa();
  force_isa(Isa::Scalar);
  CHECK(active_isa() == Isa::Scalar);
  const std::vector<double> x = {1.0, 2.0};
  CHECK(moments(x).sum == 3.0);
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (!isa_available(isa)) CHECK_THROWS_AS(force_isa(isa), std::invalid_argument);
  }
  force_isa(before);
}
