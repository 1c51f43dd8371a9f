#include <algorithm>
#include <random>

#include "doctest.h"
#include "krnorm/errors.hpp"
#include "krnorm/measure.hpp"
#include "krnorm/measure_io.hpp"
#include "random_measures.hpp"

using namespace krnorm;

namespace {

const Domain kUnit2 = Domain::unit_box(2);
const Point p{0.1, 0.2};
const Point q{0.7, 0.4};
const Point r{0.9, 0.9};

DiscreteSignedMeasure make(std::vector<Atom> atoms) {
  return DiscreteSignedMeasure(kUnit2, std::move(atoms));
}

}  // namespace

TEST_CASE("domain geometry") {
  const Domain d({0.0, -1.0}, {3.0, 3.0});
  CHECK(d.dim() == 2);
  CHECK(d.diameter() == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(d.max_side() == 4.0);
  CHECK(d.contains(Point{3.0, -1.0}));
  CHECK_FALSE(d.contains(Point{3.0000001, 0.0}));
  CHECK_FALSE(d.contains(Point{1.0}));
  CHECK_THROWS_AS(Domain({0.0}, {0.0}), DomainError);
  CHECK_THROWS_AS(Domain({0.0, 1.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(Domain({}, {}), DomainError);
  CHECK_THROWS_AS(d.require(Point{5.0, 0.0}), DomainError);
}

TEST_CASE("measure construction validates support and weights") {
  CHECK_THROWS_AS(make({{Point{1.5, 0.0}, 1.0}}), DomainError);
  CHECK_THROWS_AS(make({{p, std::nan("")}}), ArgumentError);
  CHECK_THROWS_AS(make({{p, INFINITY}}), ArgumentError);
}

TEST_CASE("canonicalize") {
  SUBCASE("cancellation") {
    CHECK(canonicalize(make({{p, 1.0}, {p, -1.0}})).empty());
  }
  SUBCASE("merge") {
    const auto c = canonicalize(make({{p, 0.5}, {q, 2.0}, {p, 0.25}}));
    REQUIRE(c.size() == 2);
    CHECK(c.atoms()[0] == Atom{p, 0.75});
    CHECK(c.atoms()[1] == Atom{q, 2.0});
  }
  SUBCASE("empty") { CHECK(canonicalize(make({})).empty()); }
  SUBCASE("lexicographic order") {
    const auto c = canonicalize(make({{r, 1.0}, {q, 1.0}, {p, 1.0}, {Point{0.1, 0.1}, 1.0}}));
    CHECK(c.atoms()[0].point == Point{0.1, 0.1});
    CHECK(c.atoms()[1].point == p);
    CHECK(c.atoms()[3].point == r);
    CHECK(is_canonical(c));
  }
  SUBCASE("drop threshold") {
    const auto c = canonicalize(make({{p, 1e-13}, {q, 1.0}}), 1e-12);
    CHECK(c.size() == 1);
  }
}

TEST_CASE("mass and total variation") {
  CHECK(total_mass(dirac(kUnit2, p)) == 1.0);
  CHECK(total_variation(dirac(kUnit2, p)) == 1.0);
  const auto d = dipole(kUnit2, p, q, 1.0);
  CHECK(total_mass(d) == 0.0);
  CHECK(total_variation(d) == 2.0);
  const auto m = make({{p, 3.0}, {q, -1.0}});
  CHECK(total_mass(m) == 2.0);
  CHECK(total_variation(m) == 4.0);
}

TEST_CASE("hahn_jordan") {
  SUBCASE("dipole") {
    const auto hj = hahn_jordan(dipole(kUnit2, p, q, 1.0));
    CHECK(hj.positive == dirac(kUnit2, p));
    CHECK(hj.negative == dirac(kUnit2, q));
  }
  SUBCASE("positive only") {
    const auto hj = hahn_jordan(make({{p, 2.0}}));
    CHECK(hj.positive == make({{p, 2.0}}));
    CHECK(hj.negative.empty());
  }
  SUBCASE("three points") {
    const auto hj = hahn_jordan(make({{p, -1.0}, {q, 3.0}, {r, -1.0}}));
    CHECK(hj.positive == make({{q, 3.0}}));
    CHECK(hj.negative == make({{p, 1.0}, {r, 1.0}}));
  }
}

TEST_CASE("is_balanced") {
  CHECK(is_balanced(dipole(kUnit2, p, q, 1.0), 0.0));
  CHECK_FALSE(is_balanced(dirac(kUnit2, p), 0.0));
  CHECK(is_balanced(make({{p, 0.5}, {q, -0.5}, {r, 1e-12}}), 1e-9));
}

TEST_CASE("dirac and dipole") {
  CHECK(total_mass(dipole(kUnit2, p, q, 1.0)) == 0.0);
  CHECK(total_variation(dipole(kUnit2, p, q, -2.0)) == 4.0);
  CHECK(total_mass(dirac(kUnit2, p)) == 1.0);
  CHECK_THROWS_AS(dipole(kUnit2, p, p, 1.0), DegenerateDipoleError);
}

TEST_CASE("arithmetic requires a common domain") {
  const auto a = dirac(kUnit2, p);
  const auto b = dirac(Domain({0.0, 0.0}, {2.0, 2.0}), p);
  CHECK_THROWS_AS(a + b, DomainError);
  CHECK((a - a).empty());
  CHECK((2.0 * a) == make({{p, 2.0}}));
}

TEST_CASE("measure invariants on random inputs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const bool balanced = trial % 2 == 0;
    const auto m = testing::random_measure(rng, kUnit2, 12, balanced);
    // Duplicate some atoms and shuffle, then compare invariants.
    std::vector<Atom> atoms(m.atoms().begin(), m.atoms().end());
    const std::size_t n = atoms.size();
    for (std::size_t i = 0; i < n; i += 2) {
      atoms[i].weight *= 0.5;
      atoms.push_back(atoms[i]);
    }
    std::shuffle(atoms.begin(), atoms.end(), rng);
    const DiscreteSignedMeasure raw(kUnit2, atoms);
    const auto c = canonicalize(raw);
    CHECK(canonicalize(c) == c);
    CHECK(c == m);
    CHECK(total_mass(raw) == doctest::Approx(total_mass(c)).epsilon(1e-12));
    CHECK(total_variation(raw) == doctest::Approx(total_variation(c)).epsilon(1e-12));
    const auto hj = hahn_jordan(raw);
    CHECK(hj.positive - hj.negative == c);
    CHECK(std::abs(total_mass(c)) <= total_variation(c));
  }
}

TEST_CASE("json round trip") {
  std::mt19937_64 rng(11);
  const Domain d({-1.0, 0.0, 2.0}, {1.0, 0.5, 3.0});
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = testing::random_measure(rng, d, 8, trial % 2 == 0);
    const std::string text = serialize_measure(m);
    const auto back = parse_measure(text);
    CHECK(back == m);
    CHECK(serialize_measure(canonicalize(back)) == text);
  }
}

TEST_CASE("json errors name the offending field") {
  auto message = [](const char* text) {
    try {
      parse_measure(text);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("{") .find("line") != std::string::npos);
  CHECK(message(R"({"dim":1,"lo":[0],"hi":[1]})").find("atoms") != std::string::npos);
  CHECK(message(R"({"dim":1,"lo":[0],"hi":[1],"atoms":[{"point":[2],"weight":1}]})")
            .find("atoms[0]") != std::string::npos);
  CHECK(message(R"({"dim":2,"lo":[0],"hi":[1],"atoms":[]})").find("lo") != std::string::npos);
  CHECK(message(R"({"dim":1,"lo":[0],"hi":[1],"atoms":[{"point":[0.5],"weight":"x"}]})")
            .find("weight") != std::string::npos);
}
