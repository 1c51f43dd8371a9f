#include <cmath>
#include <random>

#include "doctest.h"
#include "krnorm/decompose.hpp"
#include "krnorm/errors.hpp"
#include "krnorm/kr.hpp"
#include "random_measures.hpp"

using namespace krnorm;

namespace {

const Domain kUnit2 = Domain::unit_box(2);
const FamilyConfig kCfg2(kUnit2);

DiscreteSignedMeasure pair_dipole(std::uint64_t j, double scale, const FamilyConfig& cfg) {
  const FamilyPair p = family_pair(FamilyIndex(j), cfg);
  return scale * dipole(cfg.domain, p.x.point, p.y.point, 1.0 / p.separation);
}

double max_atom_gap(const DiscreteSignedMeasure& a, const DiscreteSignedMeasure& b) {
  double worst = 0.0;
  for (const Atom& x : canonicalize(a - b).atoms()) worst = std::max(worst, std::abs(x.weight));
  return worst;
}

}  // namespace

TEST_CASE("a scaled pair dipole decomposes to itself") {
  const auto m = pair_dipole(5, 0.7, kCfg2);
  const auto dec = decompose_balanced(m, 1e-6, kCfg2);
  REQUIRE(dec.terms.size() == 1);
  CHECK(dec.terms[0].pair == FamilyIndex(5));
  CHECK(dec.terms[0].alpha == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(dec.residual_norm <= 1e-12);
  CHECK(dec.l1 == std::abs(dec.terms[0].alpha));
}

TEST_CASE("a dipole between two D1 points chains through D2") {
  const Point a{0.25, 0.25}, b{0.75, 0.5};
  const auto m = dipole(kUnit2, a, b, 1.0);
  const auto dec = decompose_balanced(m, 1e-6, kCfg2);
  CHECK(dec.terms.size() >= 2);
  CHECK(dec.residual_norm <= 1e-6);
  CHECK(kr0_norm(m - reconstruct(dec)).value <= 1e-6);
}

TEST_CASE("random balanced measures: residual and upper bound") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 1 + trial % 3;
    const FamilyConfig cfg(Domain::unit_box(dim));
    const auto m = testing::random_measure(rng, cfg.domain, 6, true);
    const double tol = trial % 2 ? 1e-3 : 1e-5;
    const auto dec = decompose_balanced(m, tol, cfg);
    const double fresh = kr0_norm(m - reconstruct(dec)).value;
    CHECK(fresh <= tol);
    CHECK(std::abs(fresh - dec.residual_norm) <= 1e-9);
    CHECK(kr0_norm(m).value <= dec.l1 + dec.residual_norm + 1e-9);
    double l1 = 0.0;
    for (std::size_t i = 0; i < dec.terms.size(); ++i) {
      l1 += std::abs(dec.terms[i].alpha);
      if (i) CHECK(dec.terms[i - 1].pair < dec.terms[i].pair);
      CHECK(dec.terms[i].alpha != 0.0);
    }
    CHECK(l1 == dec.l1);
    const BoundReport r = verify_bounds(m, dec, tol);
    CHECK(r.upper_ok);
    CHECK(r.per_term_lower_ok);
    CHECK(r.ratio > 0.0);
    CHECK(r.ratio <= 1.0 + 1e-9);
  }
}

TEST_CASE("decompose_balanced errors") {
  CHECK_THROWS_AS(decompose_balanced(dirac(kUnit2, Point{0.5, 0.5}), 1e-3, kCfg2),
                  BalanceError);
  const auto m = dipole(kUnit2, Point{0.1, 0.1}, Point{0.2, 0.9}, 1.0);
  CHECK_THROWS_AS(decompose_balanced(m, 0.0, kCfg2), ArgumentError);
  CHECK_THROWS_AS(decompose_balanced(m, -1.0, kCfg2), ArgumentError);
  CHECK_THROWS_AS(decompose_balanced(m, 1e-3, FamilyConfig(Domain::unit_box(3))),
                  DomainError);
  const auto zero = decompose_balanced(DiscreteSignedMeasure(kUnit2), 1e-3, kCfg2);
  CHECK(zero.terms.empty());
  CHECK(zero.l1 == 0.0);
  CHECK(zero.ratio() == 0.0);
}

TEST_CASE("full decomposition examples") {
  const FamilyPair p1 = family_pair(FamilyIndex(1), kCfg2);
  const auto dx = decompose_full(dirac(kUnit2, p1.x.point), 1e-6, kCfg2);
  REQUIRE(dx.terms.size() == 1);
  CHECK(dx.terms[0].pair == FamilyIndex(1));
  CHECK(dx.terms[0].alpha1 == 0.0);
  CHECK(dx.terms[0].alpha2 == 1.0);
  CHECK(dx.residual_norm == 0.0);

  const auto dp = decompose_full(dirac(kUnit2, Point{0.3, 0.61}), 1e-4, kCfg2);
  int deltas = 0;
  for (const FullTerm& t : dp.terms) deltas += t.alpha2 != 0.0;
  CHECK(deltas == 1);
  CHECK(dp.alpha2_sum() == 1.0);
  CHECK(dp.terms.size() >= 2);
  CHECK(kr_norm(dirac(kUnit2, Point{0.3, 0.61}) - reconstruct(dp)).value <= 1e-4);

  CHECK_THROWS_AS(decompose_full(dirac(kUnit2, Point{0.3, 0.6}), 0.0, kCfg2), ArgumentError);
}

TEST_CASE("full decompositions of random measures") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 1 + trial % 3;
    const FamilyConfig cfg(Domain::unit_box(dim));
    const bool balanced = trial % 4 == 0;
    const auto m = testing::random_measure(rng, cfg.domain, 6, balanced);
    const double tol = 1e-4;
    const auto dec = decompose_full(m, tol, cfg);
    const double fresh = kr_norm(m - reconstruct(dec)).value;
    CHECK(fresh <= tol);
    CHECK(kr_norm(m).value <= dec.l1 + dec.residual_norm + 1e-9);
    // The delta coefficients carry the total mass up to rounding.
    CHECK(std::abs(dec.alpha2_sum() - total_mass(m)) <= 1e-12);
    if (balanced) CHECK(std::abs(dec.alpha2_sum()) <= 1e-12);
    const BoundReport r = verify_bounds(m, dec, tol);
    CHECK(r.upper_ok);
    CHECK(r.per_term_lower_ok);
  }
}

TEST_CASE("mass identity across start depths") {
  const auto d = dirac(kUnit2, Point{0.37, 0.71});
  DecomposeOptions shallow, deep;
  shallow.start_depth = 1;
  deep.start_depth = 4;
  const auto a = decompose_full(d, 1e-5, kCfg2, shallow);
  const auto b = decompose_full(d, 1e-5, kCfg2, deep);
  CHECK(a.alpha2_sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.alpha2_sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mass_identity_check(a, b, 1e-5));
  CHECK(mass_identity_check(a, a, 1e-5));

  std::mt19937_64 rng(107);
  const auto bal = testing::random_measure(rng, kUnit2, 5, true);
  const auto c1 = decompose_full(bal, 1e-5, kCfg2, shallow);
  const auto c2 = decompose_full(bal, 1e-5, kCfg2, deep);
  CHECK(std::abs(c1.alpha2_sum()) <= 1e-12);
  CHECK(mass_identity_check(c1, c2, 1e-5));

  CHECK_THROWS_AS(mass_identity_check(a, c1, 1e-5), ArgumentError);
}

TEST_CASE("l1-minimal decompositions") {
  const auto m3 = pair_dipole(3, 1.0, kCfg2);
  const auto d3 = decompose_l1_minimal_balanced(m3, 10, kCfg2);
  REQUIRE(d3.terms.size() == 1);
  CHECK(d3.terms[0].pair == FamilyIndex(3));
  CHECK(d3.terms[0].alpha == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d3.l1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d3.ratio() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d3.residual_norm <= 1e-12);

  const auto m13 = pair_dipole(1, 1.0, kCfg2) + pair_dipole(3, 1.0, kCfg2);
  const auto d13 = decompose_l1_minimal_balanced(m13, 10, kCfg2);
  CHECK(d13.l1 <= 2.0 + 1e-12);
  CHECK(d13.ratio() >= kr0_norm(m13).value / 2.0 - 1e-12);
  CHECK(d13.residual_norm <= 1e-12);
  const BoundReport r = verify_bounds(m13, d13, 1e-9, kr0_norm(m13).value / 2.0);
  CHECK(r.upper_ok);
  CHECK(r.floor_ok);

  // Greedy is never better in l1 than the optimum over the same pairs.
  const auto g13 = decompose_balanced(m13, 1e-9, kCfg2);
  CHECK(d13.l1 <= g13.l1 + 1e-9);

  const FamilyPair p2 = family_pair(FamilyIndex(2), kCfg2);
  const auto full = decompose_l1_minimal_full(2.0 * dirac(kUnit2, p2.x.point), 6, kCfg2);
  CHECK(full.residual_norm <= 1e-12);
  CHECK(full.alpha2_sum() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(full.l1 == doctest::Approx(2.0).epsilon(1e-12));

  const auto off = dipole(kUnit2, Point{0.3, 0.3}, Point{0.6, 0.6}, 1.0);
  try {
    decompose_l1_minimal_balanced(off, 10, kCfg2);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("(0.3, 0.3)") != std::string::npos);
  }
  CHECK_THROWS_AS(decompose_l1_minimal_balanced(m3, 0, kCfg2), ArgumentError);
  CHECK_THROWS_AS(decompose_l1_minimal_balanced(dirac(kUnit2, p2.x.point), 10, kCfg2),
                  BalanceError);
}

TEST_CASE("l1-minimal single terms meet the per-term floor") {
  std::mt19937_64 rng(109);
  std::uniform_int_distribution<std::uint64_t> pick(1, 30);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  const double floor = 1.0 / (kUnit2.diameter() + 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint64_t j = pick(rng);
    const FamilyPair p = family_pair(FamilyIndex(j), kCfg2);
    const double a1 = coef(rng), a2 = coef(rng);
    const auto m = canonicalize(a1 * pair_dipole(j, 1.0, kCfg2) + a2 * dirac(kUnit2, p.x.point));
    const auto dec = decompose_l1_minimal_full(m, 30, kCfg2);
    const BoundReport r = verify_bounds(m, dec, 1e-9, floor);
    CHECK(r.upper_ok);
    CHECK(r.floor_ok);
    CHECK(r.ratio >= floor - 1e-9);
  }
}

TEST_CASE("reconstruct") {
  const auto m = pair_dipole(2, 1.5, kCfg2) + pair_dipole(7, -0.25, kCfg2);
  const auto dec = decompose_l1_minimal_balanced(m, 10, kCfg2);
  CHECK(max_atom_gap(reconstruct(dec), m) <= 1e-12);
  CHECK(reconstruct(dec, 0).empty());
  CHECK_THROWS_AS(reconstruct(dec, dec.terms.size() + 1), ArgumentError);
}

TEST_CASE("prefix residuals on greedy decompositions") {
  // The series is sorted by pair index, not built in order of decreasing
  // weight, so the partial-sum residual can rise. Count how often.
  std::mt19937_64 rng(113);
  int rises = 0, steps = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = testing::random_measure(rng, kUnit2, 4, true);
    const auto dec = decompose_balanced(m, 1e-3, kCfg2);
    double prev = kr0_norm(m).value;
    for (std::size_t n = 1; n <= dec.terms.size(); ++n) {
      const double r = kr0_norm(m - reconstruct(dec, n)).value;
      rises += r > prev + 1e-9;
      ++steps;
      prev = r;
    }
    CHECK(prev <= 1e-3);
  }
  MESSAGE("prefix residual rises: " << rises << " of " << steps);
}

TEST_CASE("test functions") {
  const double d = kUnit2.diameter();
  const FamilyPair p = family_pair(FamilyIndex(4), kCfg2);
  CHECK(testfn_eval(FamilyIndex(4), 1.0, 1.0, p.x.point, kCfg2) ==
        doctest::Approx(1.0 / (d + 1.0)).epsilon(1e-15));
  const Point x0 = family_pair(FamilyIndex(1), kCfg2).x.point;  // the origin
  CHECK(testfn_eval(FamilyIndex(1), 2.0, 0.0, Point{1.0, 0.0}, kCfg2) == 0.0);
  CHECK(x0 == Point{0.0, 0.0});

  std::mt19937_64 rng(127);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const FamilyIndex j(1 + trial);
    const double a1 = coef(rng), a2 = coef(rng);
    const Point z = testing::random_point(rng, kUnit2);
    CHECK(testfn_eval(j, -a1, -a2, z, kCfg2) == -testfn_eval(j, a1, a2, z, kCfg2));
  }
  // A zero coefficient counts as nonnegative under either sign, so the
  // antisymmetry breaks there.
  const Point z{0.5, 0.5};
  const double r = distance(x0, z);
  CHECK(testfn_eval(FamilyIndex(1), 0.0, 1.0, z, kCfg2) == (1.0 - r) / (d + 1.0));
  CHECK(testfn_eval(FamilyIndex(1), -0.0, -1.0, z, kCfg2) == (-1.0 - r) / (d + 1.0));
}

TEST_CASE("per-term lower bound") {
  const double d = kUnit2.diameter();
  const auto t1 = verify_term_lower_bound(FamilyIndex(3), 1.0, 0.0, kCfg2);
  CHECK(t1.lhs == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(t1.rhs == doctest::Approx(1.0 / (d + 1.0)));
  CHECK(t1.ok);
  const auto t2 = verify_term_lower_bound(FamilyIndex(3), 0.0, 1.0, kCfg2);
  CHECK(t2.lhs == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(t2.ok);
  CHECK_THROWS_AS(verify_term_lower_bound(FamilyIndex(3), 0.0, 0.0, kCfg2), ArgumentError);

  std::mt19937_64 rng(131);
  std::uniform_int_distribution<std::uint64_t> pick(1, 500);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const FamilyIndex j(pick(rng));
    const double a1 = coef(rng), a2 = coef(rng);
    const auto t = verify_term_lower_bound(j, a1, a2, kCfg2);
    CHECK(t.ok);
    CHECK(t.lhs >= t.rhs - 1e-9);
    CHECK(std::abs(t.pairing - t.rhs) <= 1e-12);
    CHECK(t.sampled_lip_norm <= 1.0 + 1e-9);
  }

  const FamilyConfig line(Domain({0.0}, {3.0}));
  const auto t3 = verify_term_lower_bound(FamilyIndex(2), -1.0, 0.5, line);
  CHECK(t3.ok);
}

TEST_CASE("verify_bounds") {
  const auto m = pair_dipole(5, 0.7, kCfg2);
  const auto dec = decompose_balanced(m, 1e-6, kCfg2);
  const BoundReport r = verify_bounds(m, dec, 1e-6);
  CHECK(r.upper_ok);
  CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.per_term_lower_ok);
  CHECK(r.floor_ok);

  const auto other = pair_dipole(6, 0.7, kCfg2);
  CHECK_THROWS_AS(verify_bounds(other, dec, 1e-6), ArgumentError);

  // A tampered series fails the upper bound check only if it undershoots.
  auto bad = dec;
  bad.terms[0].alpha = 0.1;
  const BoundReport rb = verify_bounds(m, bad, 1e-6);
  CHECK(rb.upper_ok);
  CHECK(rb.residual == doctest::Approx(0.6).epsilon(1e-9));
}

TEST_CASE("json round trip") {
  std::mt19937_64 rng(137);
  const auto m = testing::random_measure(rng, kUnit2, 4, true);
  const auto dec = decompose_balanced(m, 1e-3, kCfg2);
  const auto j = decomposition_to_json(dec);
  CHECK(j["variant"] == "kr0");
  CHECK(j["terms"].size() == dec.terms.size());
  const ParsedDecomposition back = decomposition_from_json(j);
  REQUIRE(back.balanced);
  CHECK_FALSE(back.full);
  REQUIRE(back.balanced->terms.size() == dec.terms.size());
  for (std::size_t i = 0; i < dec.terms.size(); ++i) {
    CHECK(back.balanced->terms[i].pair == dec.terms[i].pair);
    CHECK(back.balanced->terms[i].alpha == dec.terms[i].alpha);
  }
  CHECK(back.balanced->l1 == dec.l1);
  CHECK(back.balanced->target == dec.target);

  const auto g = testing::random_measure(rng, kUnit2, 4, false);
  const auto full = decompose_full(g, 1e-3, kCfg2);
  const ParsedDecomposition fb = decomposition_from_json(decomposition_to_json(full));
  REQUIRE(fb.full);
  CHECK(fb.full->alpha2_sum() == full.alpha2_sum());
  CHECK(verify_bounds(g, *fb.full, 1e-3).upper_ok);

  // Indices beyond 64 bits travel as strings.
  auto big = decomposition_to_json(dec);
  big["terms"] = nlohmann::json::array({nlohmann::json::array({"36893488147419103232", 0.5})});
  const auto parsed = decomposition_from_json(big);
  CHECK(parsed.balanced->terms[0].pair.to_string() == "36893488147419103232");
  CHECK(decomposition_to_json(*parsed.balanced)["terms"][0][0].is_string());

  auto broken = decomposition_to_json(dec);
  broken["terms"][0] = nlohmann::json::array({1});
  CHECK_THROWS_WITH_AS(decomposition_from_json(broken), "dec.terms[0]: expected [j, alpha]",
                       ParseError);
  broken = decomposition_to_json(dec);
  broken["variant"] = "kr2";
  CHECK_THROWS_AS(decomposition_from_json(broken), ParseError);
  broken = decomposition_to_json(dec);
  broken.erase("target");
  CHECK_THROWS_WITH_AS(decomposition_from_json(broken), "dec: missing field 'target'",
                       ParseError);
}
