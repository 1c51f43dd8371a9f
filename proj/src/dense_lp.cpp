#include "krnorm/dense_lp.hpp"

#include <cmath>
#include <limits>

#include "krnorm/errors.hpp"

namespace krnorm::lp {
namespace {

// Tableau rows 0..m-1 are constraints, row m is the reduced-cost row of a
// minimization. Column `cols` holds the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double& cost(std::size_t c) { return at(rows_, c); }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const std::size_t w = cols_ + 1;
    double* prow = &data_[pr * w];
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < w; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      double* row = &data_[r * w];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < w; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  void drop_row(std::size_t r) {
    const std::size_t w = cols_ + 1;
    data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * w),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * w));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

enum class RunResult { Optimal, Unbounded };

// Minimizes the cost row over columns with allowed[c] true.
RunResult run_simplex(Tableau& t, const std::vector<bool>& allowed,
                      const Options& opt, std::size_t& iterations) {
  std::size_t degenerate_run = 0;
  const std::size_t bland_after = 50;
  while (true) {
    if (++iterations > opt.max_iterations) throw SolverError("simplex iteration cap reached");
    const bool bland = degenerate_run > bland_after;
    std::size_t enter = t.cols();
    double best = -opt.cost_tol;
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (!allowed[c]) continue;
      const double rc = t.cost(c);
      if (rc < best) {
        enter = c;
        if (bland) break;
        best = rc;
      }
    }
    if (enter == t.cols()) return RunResult::Optimal;

    std::size_t leave = t.rows();
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= opt.pivot_tol) continue;
      const double q = t.rhs(r) / a;
      if (q < ratio || (q == ratio && t.basis()[r] < t.basis()[leave])) {
        ratio = q;
        leave = r;
      }
    }
    if (leave == t.rows()) return RunResult::Unbounded;
    degenerate_run = (ratio <= 0.0) ? degenerate_run + 1 : 0;
    t.pivot(leave, enter);
    // Clamp rounding noise so the basis stays primal feasible.
    for (std::size_t r = 0; r < t.rows(); ++r) {
      if (t.rhs(r) < 0.0 && t.rhs(r) > -opt.feasibility_tol) t.rhs(r) = 0.0;
    }
  }
}

}  // namespace

Solution solve(const Problem& problem, const Options& opt) {
  const std::size_t n = problem.num_vars;
  const std::size_t m = problem.constraints.size();
  if (problem.objective.size() != n) throw ArgumentError("lp: objective size mismatch");

  // Normalize to nonnegative right-hand sides.
  std::vector<Constraint> rows = problem.constraints;
  std::size_t slacks = 0, artificials = 0;
  for (Constraint& c : rows) {
    if (c.coeffs.size() != n) throw ArgumentError("lp: constraint size mismatch");
    if (c.rhs < 0.0) {
      for (double& a : c.coeffs) a = -a;
      c.rhs = -c.rhs;
      if (c.relation == Relation::LessEqual) {
        c.relation = Relation::GreaterEqual;
      } else if (c.relation == Relation::GreaterEqual) {
        c.relation = Relation::LessEqual;
      }
    }
    if (c.relation != Relation::Equal) ++slacks;
    if (c.relation != Relation::LessEqual) ++artificials;
  }

  const std::size_t cols = n + slacks + artificials;
  Tableau t(m, cols);
  std::vector<bool> is_artificial(cols, false);
  std::size_t next_slack = n, next_art = n + slacks;
  for (std::size_t r = 0; r < m; ++r) {
    const Constraint& c = rows[r];
    for (std::size_t j = 0; j < n; ++j) t.at(r, j) = c.coeffs[j];
    t.rhs(r) = c.rhs;
    switch (c.relation) {
      case Relation::LessEqual:
        t.at(r, next_slack) = 1.0;
        t.basis()[r] = next_slack++;
        break;
      case Relation::GreaterEqual:
        t.at(r, next_slack++) = -1.0;
        t.at(r, next_art) = 1.0;
        is_artificial[next_art] = true;
        t.basis()[r] = next_art++;
        break;
      case Relation::Equal:
        t.at(r, next_art) = 1.0;
        is_artificial[next_art] = true;
        t.basis()[r] = next_art++;
        break;
    }
  }

  Solution sol;
  std::vector<bool> allowed(cols, true);

  if (artificials > 0) {
    // Phase one: minimize the sum of artificials.
    for (std::size_t c = 0; c <= cols; ++c) t.cost(c) = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_artificial[t.basis()[r]]) continue;
      for (std::size_t c = 0; c <= cols; ++c) {
        if (!is_artificial[c] || c == cols) t.cost(c) -= t.at(r, c);
      }
    }
    run_simplex(t, allowed, opt, sol.iterations);
    if (-t.cost(cols) > opt.feasibility_tol) {
      sol.status = Status::Infeasible;
      return sol;
    }
    // Drive artificials out of the basis; drop redundant rows.
    for (std::size_t r = 0; r < t.rows();) {
      if (!is_artificial[t.basis()[r]]) {
        ++r;
        continue;
      }
      std::size_t pc = cols;
      double best = opt.pivot_tol;
      for (std::size_t c = 0; c < cols; ++c) {
        if (is_artificial[c]) continue;
        if (std::abs(t.at(r, c)) > best) {
          best = std::abs(t.at(r, c));
          pc = c;
        }
      }
      if (pc == cols) {
        t.drop_row(r);
      } else {
        t.pivot(r, pc);
        ++r;
      }
    }
    for (std::size_t c = 0; c < cols; ++c) allowed[c] = !is_artificial[c];
  }

  // Phase two.
  const double sign = problem.sense == Sense::Maximize ? -1.0 : 1.0;
  for (std::size_t c = 0; c <= cols; ++c) t.cost(c) = 0.0;
  for (std::size_t j = 0; j < n; ++j) t.cost(j) = sign * problem.objective[j];
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const std::size_t b = t.basis()[r];
    const double f = t.cost(b);
    if (f == 0.0) continue;
    for (std::size_t c = 0; c <= cols; ++c) t.cost(c) -= f * t.at(r, c);
  }
  if (run_simplex(t, allowed, opt, sol.iterations) == RunResult::Unbounded) {
    sol.status = Status::Unbounded;
    return sol;
  }

  sol.status = Status::Optimal;
  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (t.basis()[r] < n) sol.x[t.basis()[r]] = t.rhs(r);
  }
  double obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) obj += problem.objective[j] * sol.x[j];
  sol.objective = obj;
  return sol;
}

}  // namespace krnorm::lp
