#pragma once

// Brute-force reference values for tiny instances. Nothing here touches the
// flow or LP solvers.

#include <vector>

#include "krnorm/measure.hpp"

namespace krnorm {

inline constexpr std::size_t kOracleMaxUnits = 12;
inline constexpr std::size_t kOracleMaxSupport = 4;
inline constexpr int kOracleMaxGridDepth = 6;
inline constexpr double kQuantizationTol = 1e-9;

/// Every atom replicated as |w|/q unit copies of mass q.
struct QuantizedInstance {
  double unit = 0.0;
  std::vector<Point> sources;  // negative part
  std::vector<Point> sinks;    // positive part
};

/// Throws ArgumentError when a weight is not within kQuantizationTol of a
/// multiple of q, OracleLimitError when a side exceeds kOracleMaxUnits.
QuantizedInstance quantize(const DiscreteSignedMeasure& m, double q);

/// Minimum-cost perfect matching of unit copies by branch and bound.
/// Throws BalanceError when the unit counts differ.
double oracle_kr0(const DiscreteSignedMeasure& m, double q);

/// As oracle_kr0, but any unit may be created or destroyed at cost q.
double oracle_kr(const DiscreteSignedMeasure& m, double q);

/// max <f, m> over potentials with f = 0 at the first support point and
/// other values on the grid {-D + k D / 2^depth} (D the support spread),
/// subject to |f_i - f_j| <= |p_i - p_j|. A lower bound on the KR0 dual,
/// nondecreasing in depth. Balanced measures only.
double oracle_dual_grid(const DiscreteSignedMeasure& m, int grid_depth);

}  // namespace krnorm
