#include <random>

#include "doctest.h"
#include "krnorm/dense_lp.hpp"

using namespace krnorm::lp;

TEST_CASE("textbook maximization") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6).
  Problem p{2, Sense::Maximize, {3.0, 5.0},
            {{{1.0, 0.0}, Relation::LessEqual, 4.0},
             {{0.0, 2.0}, Relation::LessEqual, 12.0},
             {{3.0, 2.0}, Relation::LessEqual, 18.0}}};
  const Solution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(36.0));
  CHECK(s.x[0] == doctest::Approx(2.0));
  CHECK(s.x[1] == doctest::Approx(6.0));
}

TEST_CASE("two-phase with equality and >= rows") {
  // min x + y, x + 2y >= 4, x - y = 1 -> x = 2, y = 1.
  Problem p{2, Sense::Minimize, {1.0, 1.0},
            {{{1.0, 2.0}, Relation::GreaterEqual, 4.0},
             {{1.0, -1.0}, Relation::Equal, 1.0}}};
  const Solution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(3.0));
  CHECK(s.x[0] == doctest::Approx(2.0));
}

TEST_CASE("negative right-hand sides are normalized") {
  // min x, -x <= -3 -> 3.
  Problem p{1, Sense::Minimize, {1.0}, {{{-1.0}, Relation::LessEqual, -3.0}}};
  const Solution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(3.0));
}

TEST_CASE("infeasible and unbounded programs") {
  Problem inf{1, Sense::Minimize, {1.0},
              {{{1.0}, Relation::LessEqual, 1.0}, {{1.0}, Relation::GreaterEqual, 2.0}}};
  CHECK(solve(inf).status == Status::Infeasible);
  Problem unb{2, Sense::Maximize, {1.0, 0.0}, {{{0.0, 1.0}, Relation::LessEqual, 1.0}}};
  CHECK(solve(unb).status == Status::Unbounded);
}

TEST_CASE("redundant equality rows") {
  Problem p{2, Sense::Minimize, {1.0, 2.0},
            {{{1.0, 1.0}, Relation::Equal, 1.0},
             {{2.0, 2.0}, Relation::Equal, 2.0}}};
  const Solution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == doctest::Approx(1.0));
}

TEST_CASE("degenerate assignment programs terminate") {
  // Assignment LPs are highly degenerate; compare against enumeration.
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> c(0, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4;
    std::vector<double> cost(n * n);
    for (double& x : cost) x = c(rng);
    Problem p{n * n, Sense::Minimize, cost, {}};
    for (std::size_t i = 0; i < n; ++i) {
      Constraint row{std::vector<double>(n * n, 0.0), Relation::Equal, 1.0};
      Constraint col{std::vector<double>(n * n, 0.0), Relation::Equal, 1.0};
      for (std::size_t j = 0; j < n; ++j) {
        row.coeffs[i * n + j] = 1.0;
        col.coeffs[j * n + i] = 1.0;
      }
      p.constraints.push_back(row);
      p.constraints.push_back(col);
    }
    const Solution s = solve(p);
    REQUIRE(s.status == Status::Optimal);
    std::vector<std::size_t> perm{0, 1, 2, 3};
    double best = 1e300;
    do {
      double t = 0;
      for (std::size_t i = 0; i < n; ++i) t += cost[i * n + perm[i]];
      best = std::min(best, t);
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(s.objective == doctest::Approx(best));
  }
}
