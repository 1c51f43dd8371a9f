#pragma once

// Balanced transportation problems on a dense cost matrix.
//
//   min sum_ij c_ij x_ij  s.t.  sum_j x_ij = supply_i,  sum_i x_ij = demand_j,
//                               x >= 0.
//
// `solve` is the transportation simplex (MODI): a matrix-minimum starting
// basis of exactly rows + cols - 1 cells, tree potentials, most negative
// reduced cost enters, ratio test along the basis cycle. `solve_dense_lp`
// hands the same program to the generic tableau simplex and is the fallback
// when the network method stalls.

#include <cstddef>
#include <vector>

namespace krnorm::transport {

struct Problem {
  std::vector<double> supply;  // rows
  std::vector<double> demand;  // columns
  std::vector<double> cost;    // row-major, supply.size() x demand.size()
};

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;
  double mass = 0.0;
};

struct Options {
  double pivot_tol = 1e-12;  // relative to the largest cost
  std::size_t max_iterations = 0;  // 0: 50 * (rows + cols) + 1000
};

struct Solution {
  double cost = 0.0;
  /// Basic cells, including degenerate ones with zero mass.
  std::vector<Cell> basis;
  /// Row and column potentials with u_i + v_j = c_ij on basic cells.
  /// Empty for solve_dense_lp.
  std::vector<double> u;
  std::vector<double> v;
  std::size_t iterations = 0;
  bool converged = true;
};

/// Totals may differ by rounding noise; the excess is left unassigned.
Solution solve(const Problem& problem, const Options& options = {});

Solution solve_dense_lp(const Problem& problem);

}  // namespace krnorm::transport
