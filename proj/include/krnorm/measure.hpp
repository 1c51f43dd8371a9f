#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace krnorm {

/// A point of R^n. Equality is exact (bitwise on the stored doubles) and the
/// ordering is lexicographic by coordinates.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) {}
  Point(std::initializer_list<double> coords) : coords_(coords) {}

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

  friend bool operator==(const Point&, const Point&) = default;
  friend std::partial_ordering operator<=>(const Point& a, const Point& b) {
    return a.coords_ <=> b.coords_;
  }

 private:
  std::vector<double> coords_;
};

/// Euclidean distance, accumulated axis by axis in index order.
double distance(const Point& a, const Point& b);

/// Axis-aligned compact box K = [lo, hi] in R^n.
class Domain {
 public:
  Domain(std::vector<double> lo, std::vector<double> hi);
  static Domain unit_box(std::size_t dim);

  std::size_t dim() const { return lo_.size(); }
  std::span<const double> lo() const { return lo_; }
  std::span<const double> hi() const { return hi_; }
  double side(std::size_t axis) const { return hi_[axis] - lo_[axis]; }
  double max_side() const;
  /// |hi - lo|, the diameter of the box.
  double diameter() const { return diameter_; }

  bool contains(const Point& p) const;
  /// Throws DomainError when p has the wrong dimension or lies outside.
  void require(const Point& p) const;

  friend bool operator==(const Domain& a, const Domain& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
  double diameter_ = 0.0;
};

struct Atom {
  Point point;
  double weight = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finitely supported signed measure sum_i w_i delta_{p_i} on a box.
///
/// The atom list is stored as given; `canonicalize` produces the normal form
/// (distinct points in lexicographic order, no zero weights). Two measures
/// compare equal only when their atom lists are identical, so compare
/// canonical forms.
class DiscreteSignedMeasure {
 public:
  explicit DiscreteSignedMeasure(Domain domain) : domain_(std::move(domain)) {}
  /// Throws DomainError for points outside the domain and ArgumentError for
  /// non-finite weights.
  DiscreteSignedMeasure(Domain domain, std::vector<Atom> atoms);

  const Domain& domain() const { return domain_; }
  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  friend bool operator==(const DiscreteSignedMeasure&,
                         const DiscreteSignedMeasure&) = default;

 private:
  Domain domain_;
  std::vector<Atom> atoms_;
};

struct HahnJordanPair {
  DiscreteSignedMeasure positive;
  DiscreteSignedMeasure negative;
};

/// Merges duplicate points by summing weights, removes atoms with
/// |w| <= drop_threshold (default: exact zeros only) and sorts the support
/// lexicographically. Idempotent.
DiscreteSignedMeasure canonicalize(const DiscreteSignedMeasure& m,
                                   double drop_threshold = 0.0);

bool is_canonical(const DiscreteSignedMeasure& m);

double total_mass(const DiscreteSignedMeasure& m);
double total_variation(const DiscreteSignedMeasure& m);

/// Split into mutually singular positive parts, m = positive - negative.
HahnJordanPair hahn_jordan(const DiscreteSignedMeasure& m);

/// |total_mass(m)| <= tol.
bool is_balanced(const DiscreteSignedMeasure& m, double tol);

DiscreteSignedMeasure dirac(const Domain& domain, const Point& x);
/// a (delta_x - delta_y). Throws DegenerateDipoleError when x == y.
DiscreteSignedMeasure dipole(const Domain& domain, const Point& x,
                             const Point& y, double a);

// Canonical arithmetic. Both operands must live on the same domain.
DiscreteSignedMeasure operator+(const DiscreteSignedMeasure& a,
                                const DiscreteSignedMeasure& b);
DiscreteSignedMeasure operator-(const DiscreteSignedMeasure& a,
                                const DiscreteSignedMeasure& b);
DiscreteSignedMeasure operator*(double s, const DiscreteSignedMeasure& m);

}  // namespace krnorm
