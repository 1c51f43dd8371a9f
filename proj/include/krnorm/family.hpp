#pragma once

// Countable dense families D1, D2 of the box and their pairing D1 x D2.
//
// D1 is the dyadic grid: depth l holds the points
//   lo + (hi - lo) * a / 2^l,  a in [0, 2^l]^n,
// enumerated by increasing depth and lexicographically within a depth,
// each point listed only at the depth where it first appears.
//
// D2 is the dyadic torus grid shifted by an irrational theta:
//   lo + (hi - lo) * frac(a / 2^l + theta),  a in [0, 2^l)^n,
// with the same depth-then-lexicographic schedule. In exact arithmetic every
// D2 coordinate is irrational, so D1 and D2 are disjoint; in floating point
// disjointness is carried by the FamilyTag, never by comparing coordinates.
//
// Pairs (x_j, y_j) walk D1 x D2 along Cantor anti-diagonals. Pair indices
// grow quadratically in the point ranks, so they are 128-bit.

#include <compare>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "krnorm/measure.hpp"

namespace krnorm {

using u128 = unsigned __int128;

/// A positive 1-based index into the pair sequence or the atom sequence.
class FamilyIndex {
 public:
  constexpr FamilyIndex() = default;
  constexpr explicit FamilyIndex(u128 v) : value_(v) {}
  constexpr u128 value() const { return value_; }
  bool fits_u64() const { return value_ <= UINT64_MAX; }

  std::string to_string() const;
  /// Decimal digits only; throws ParseError otherwise.
  static FamilyIndex parse(const std::string& s);

  friend constexpr auto operator<=>(FamilyIndex, FamilyIndex) = default;

 private:
  u128 value_ = 0;
};

enum class FamilyTag : std::uint8_t { D1, D2 };

inline FamilyTag opposite(FamilyTag t) {
  return t == FamilyTag::D1 ? FamilyTag::D2 : FamilyTag::D1;
}
const char* tag_name(FamilyTag t);

/// sqrt(2) - 1, the default D2 shift.
inline const double kDefaultTheta = std::sqrt(2.0) - 1.0;

struct FamilyConfig {
  Domain domain;
  double theta = kDefaultTheta;

  explicit FamilyConfig(Domain d, double theta_ = kDefaultTheta);
};

/// A tagged family member. `numerators` are the grid coordinates a_i at
/// `depth`; the representation is not necessarily reduced.
struct FamilyPoint {
  FamilyTag tag = FamilyTag::D1;
  int depth = 0;
  std::vector<std::uint64_t> numerators;
  Point point;
};

/// Position in the D1 or D2 enumeration (0-based). Throws IndexOverflowError
/// when the rank does not fit 64 bits.
std::uint64_t family_rank(const FamilyPoint& p, std::size_t dim);

FamilyPoint d1_point(std::uint64_t k, const FamilyConfig& cfg);
FamilyPoint d2_point(std::uint64_t k, const FamilyConfig& cfg);
FamilyPoint family_point(FamilyTag tag, std::uint64_t k, const FamilyConfig& cfg);

/// Coordinates of the grid point with the given numerators.
Point grid_coordinates(FamilyTag tag, int depth,
                       const std::vector<std::uint64_t>& numerators,
                       const FamilyConfig& cfg);

struct FamilyPair {
  FamilyIndex index;
  std::uint64_t x_rank = 0;
  std::uint64_t y_rank = 0;
  FamilyPoint x;  // D1
  FamilyPoint y;  // D2
  double separation = 0.0;
};

/// Cantor pairing: j - 1 = s (s + 1) / 2 + a with s = a + b.
FamilyIndex cantor_index(std::uint64_t x_rank, std::uint64_t y_rank);
std::pair<std::uint64_t, std::uint64_t> cantor_ranks(FamilyIndex j);

FamilyPair family_pair(FamilyIndex j, const FamilyConfig& cfg);
/// Index of the pair (x, y); x must be tagged D1 and y D2.
FamilyIndex pair_index(const FamilyPoint& x, const FamilyPoint& y);

enum class AtomKind { Dipole, Delta };

/// mu_j: the normalized dipole (delta_x - delta_y)/|x - y| of pair k for
/// j = 2k - 1, and delta_{x_k} for j = 2k.
struct DeltaAtom {
  FamilyIndex index;
  AtomKind kind = AtomKind::Dipole;
  FamilyIndex pair;
  DiscreteSignedMeasure measure;
};

DeltaAtom delta_atom(FamilyIndex j, const FamilyConfig& cfg);
/// Atom indices of pair k: 2k - 1 (dipole) and 2k (delta).
FamilyIndex dipole_atom_index(FamilyIndex pair);
FamilyIndex delta_atom_index(FamilyIndex pair);

struct Snap {
  FamilyPoint point;
  double distance = 0.0;
};

/// Nearest grid point of the chosen family at exactly `depth` (all points
/// of that depth's grid, including coarser ones). Ties go to the
/// lexicographically smaller point.
Snap nearest_family_point(const Point& p, int depth, FamilyTag which,
                          const FamilyConfig& cfg);

/// Worst-case snapping distance at `depth`: sqrt(n)/2 * max_side / 2^depth
/// for D1 and sqrt(n) * max_side / 2^depth for D2 (the shifted grid leaves
/// gaps up to one cell wide at the box faces).
double snap_bound(int depth, FamilyTag which, const Domain& domain);

/// Deepest grid used by snapping and membership tests.
inline constexpr int kMaxFamilyDepth = 52;

/// Deepest grid searched by `locate`. Every double is a dyadic rational, so
/// past roughly 50 levels the shifted grid collapses onto the dyadic one;
/// stopping at 40 keeps membership faithful to the tags.
inline constexpr int kLocateDepth = 40;

/// If p is exactly (bitwise) a member of the family at depth <= kLocateDepth,
/// that member at its minimal depth.
std::optional<FamilyPoint> locate(const Point& p, FamilyTag which,
                                  const FamilyConfig& cfg);

}  // namespace krnorm
