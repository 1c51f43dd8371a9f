#pragma once

// Deterministic random instances shared by unit and acceptance tests.

#include <cstdint>
#include <random>
#include <vector>

#include "krnorm/measure.hpp"

namespace krnorm::testing {

inline Point random_point(std::mt19937_64& rng, const Domain& d) {
  std::vector<double> c(d.dim());
  for (std::size_t i = 0; i < d.dim(); ++i) {
    std::uniform_real_distribution<double> u(d.lo()[i], d.hi()[i]);
    c[i] = u(rng);
  }
  return Point(std::move(c));
}

/// Between 1 and max_support atoms (at least 2 when balanced), weights in
/// [-1, 1] away from zero. Balanced measures get their last weight set to
/// cancel the total.
inline DiscreteSignedMeasure random_measure(std::mt19937_64& rng, const Domain& d,
                                            std::size_t max_support, bool balanced) {
  const std::size_t lo = balanced ? 2 : 1;
  std::uniform_int_distribution<std::size_t> count(lo, std::max(lo, max_support));
  std::uniform_real_distribution<double> mag(0.05, 1.0);
  std::bernoulli_distribution sign(0.5);
  const std::size_t n = count(rng);
  std::vector<Atom> atoms;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = mag(rng) * (sign(rng) ? 1.0 : -1.0);
    if (balanced && i + 1 == n) w = -sum;
    sum += w;
    atoms.push_back({random_point(rng, d), w});
  }
  if (balanced) {
    // Make sure both signs are present so the measure is nonzero.
    if (atoms.back().weight == 0.0) {
      atoms.back().weight = 0.5;
      atoms.push_back({random_point(rng, d), -0.5});
    }
  }
  return canonicalize(DiscreteSignedMeasure(d, std::move(atoms)));
}

/// Integer multiples of q: `source_units` copies of -q and `sink_units`
/// copies of +q spread over up to four points per side.
inline DiscreteSignedMeasure random_quantized(std::mt19937_64& rng, const Domain& d, double q,
                                              std::size_t source_units,
                                              std::size_t sink_units) {
  std::uniform_int_distribution<std::size_t> pool_size(1, 4);
  std::vector<Atom> atoms;
  for (auto [units, sign] : {std::pair{source_units, -1.0}, std::pair{sink_units, 1.0}}) {
    if (units == 0) continue;
    std::vector<Point> pool;
    const std::size_t k = std::min(units, pool_size(rng));
    for (std::size_t i = 0; i < k; ++i) pool.push_back(random_point(rng, d));
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    std::vector<double> counts(k, 0.0);
    for (std::size_t u = 0; u < units; ++u) counts[u < k ? u : pick(rng)] += 1.0;
    for (std::size_t i = 0; i < k; ++i) atoms.push_back({pool[i], sign * counts[i] * q});
  }
  return canonicalize(DiscreteSignedMeasure(d, std::move(atoms)));
}

}  // namespace krnorm::testing
