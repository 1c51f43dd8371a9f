#pragma once

// Small dense linear programs, solved by a two-phase tableau simplex.
//
//   optimize  c^T x   subject to  a_i^T x (<=|>=|=) b_i,  x >= 0.
//
// Dantzig pricing, switching to Bland's rule after a run of degenerate
// pivots so the method cannot cycle. Intended for a few hundred rows and
// columns.

#include <cstddef>
#include <vector>

namespace krnorm::lp {

enum class Relation { LessEqual, GreaterEqual, Equal };
enum class Sense { Minimize, Maximize };
enum class Status { Optimal, Infeasible, Unbounded };

struct Constraint {
  std::vector<double> coeffs;  // one per variable
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

struct Problem {
  std::size_t num_vars = 0;
  Sense sense = Sense::Minimize;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
};

struct Options {
  double pivot_tol = 1e-11;      // smallest admissible pivot magnitude
  double cost_tol = 1e-12;       // reduced-cost optimality threshold
  double feasibility_tol = 1e-9; // phase-one objective accepted as zero
  std::size_t max_iterations = 200000;
};

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t iterations = 0;
};

/// Throws SolverError if max_iterations is exceeded.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace krnorm::lp
