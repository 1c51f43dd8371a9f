#include <cmath>
#include <random>

#include "doctest.h"
#include "krnorm/errors.hpp"
#include "krnorm/kr.hpp"
#include "krnorm/oracle.hpp"
#include "random_measures.hpp"

using namespace krnorm;

namespace {
const Domain kUnit2 = Domain::unit_box(2);
}

TEST_CASE("matching oracle examples") {
  const Point x{0.1, 0.3}, y{0.8, 0.9};
  const double q = 0.25;
  CHECK(oracle_kr0(dipole(kUnit2, x, y, q), q) == doctest::Approx(q * distance(x, y)));
  CHECK(oracle_kr0(DiscreteSignedMeasure(kUnit2), 1.0) == 0.0);
  const DiscreteSignedMeasure three(
      kUnit2, {{Point{0.0, 0.0}, 1.0}, {Point{1.0, 0.0}, 1.0}, {Point{0.5, 0.0}, -2.0}});
  CHECK(oracle_kr0(three, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(oracle_kr(three, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(oracle_kr(q * dirac(kUnit2, x), q) == doctest::Approx(q));
  const Domain wide({0.0}, {3.0});
  CHECK(oracle_kr(dipole(wide, Point{0.0}, Point{2.5}, q), q) == doctest::Approx(2.0 * q));
  CHECK(oracle_kr(dipole(wide, Point{0.0}, Point{1.5}, q), q) == doctest::Approx(1.5 * q));
}

TEST_CASE("quantization") {
  const DiscreteSignedMeasure m(kUnit2, {{Point{0.1, 0.1}, 0.75}, {Point{0.5, 0.5}, -0.5}});
  const QuantizedInstance inst = quantize(m, 0.25);
  CHECK(inst.sinks.size() == 3);
  CHECK(inst.sources.size() == 2);
  CHECK_THROWS_AS(quantize(m, 0.3), ArgumentError);
  CHECK_THROWS_AS(quantize(m, 0.0), ArgumentError);
  CHECK_THROWS_AS(quantize(m, 0.05), OracleLimitError);
  CHECK_THROWS_AS(oracle_kr0(m, 0.25), BalanceError);
}

TEST_CASE("oracle agrees with the flow solver") {
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<std::size_t> units(1, 8);
  std::uniform_real_distribution<double> unit(0.1, 0.6);
  for (int trial = 0; trial < 80; ++trial) {
    const Domain d = Domain::unit_box(1 + trial % 2);
    const double q = unit(rng);
    const std::size_t s = units(rng);
    const auto bal = testing::random_quantized(rng, d, q, s, s);
    CHECK(std::abs(oracle_kr0(bal, q) - kr0_norm(bal).value) <= 1e-8);
    CHECK(std::abs(oracle_kr(bal, q) - kr_norm(bal).value) <= 1e-8);
    const auto gen = testing::random_quantized(rng, Domain({0.0, 0.0}, {2.0, 2.0}), q,
                                               units(rng), units(rng) - 1);
    CHECK(std::abs(oracle_kr(gen, q) - kr_norm(gen).value) <= 1e-8);
  }
}

TEST_CASE("dual grid oracle") {
  const Point x{0.2, 0.1}, y{0.7, 0.9};
  const auto d = dipole(kUnit2, x, y, 1.0);
  double prev = -1.0;
  for (int depth = 0; depth <= 6; ++depth) {
    const double v = oracle_dual_grid(d, depth);
    CHECK(v >= prev);
    CHECK(v <= distance(x, y) + 1e-12);
    prev = v;
  }
  CHECK(prev == doctest::Approx(distance(x, y)).epsilon(1e-12));
  CHECK(oracle_dual_grid(DiscreteSignedMeasure(kUnit2), 3) == 0.0);

  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = testing::random_measure(rng, kUnit2, 4, true);
    double last = -INFINITY;
    const double dual = kr0_dual(m).value;
    for (int depth = 0; depth <= 4; ++depth) {
      const double v = oracle_dual_grid(m, depth);
      CHECK(v >= last);
      CHECK(v <= dual + 1e-9);
      last = v;
    }
  }
  const auto big = testing::random_measure(rng, kUnit2, 1, true) +
                   testing::random_measure(rng, kUnit2, 2, true) +
                   dipole(kUnit2, Point{0.01, 0.02}, Point{0.03, 0.04}, 1.0);
  if (big.size() > 4) CHECK_THROWS_AS(oracle_dual_grid(big, 2), OracleLimitError);
  CHECK_THROWS_AS(oracle_dual_grid(d, 7), OracleLimitError);
  CHECK_THROWS_AS(oracle_dual_grid(dirac(kUnit2, x), 2), BalanceError);
}
