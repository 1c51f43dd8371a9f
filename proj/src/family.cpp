#include "krnorm/family.hpp"

#include <algorithm>
#include <limits>

#include "krnorm/errors.hpp"

namespace krnorm {

namespace {

constexpr u128 kU128Max = ~u128{0};

u128 mul_sat(u128 a, u128 b) {
  if (a != 0 && b > kU128Max / a) return kU128Max;
  return a * b;
}

u128 add_sat(u128 a, u128 b) { return a > kU128Max - b ? kU128Max : a + b; }

u128 pow_sat(u128 base, std::size_t e) {
  u128 r = 1;
  for (std::size_t i = 0; i < e; ++i) r = mul_sat(r, base);
  return r;
}

u128 pow2(int l) { return u128{1} << l; }

// Number of values per axis and how many of them are even, at depth l >= 1.
struct AxisCounts {
  u128 values;
  u128 evens;
};

AxisCounts axis_counts(FamilyTag tag, int l) {
  if (tag == FamilyTag::D1) return {pow2(l) + 1, pow2(l - 1) + 1};
  return {pow2(l), pow2(l - 1)};
}

// Points listed strictly before depth l.
u128 count_before(FamilyTag tag, int l, std::size_t n) {
  if (l == 0) return 0;
  if (tag == FamilyTag::D1) return pow_sat(pow2(l - 1) + 1, n);
  return pow_sat(pow2(l - 1), n);
}

void require_exact(u128 v) {
  if (v == kU128Max) throw IndexOverflowError("family enumeration count overflow");
}

std::vector<std::uint64_t> unrank_in_depth(FamilyTag tag, int l, std::size_t n,
                                           u128 r) {
  std::vector<std::uint64_t> a(n, 0);
  if (l == 0) {
    if (tag == FamilyTag::D1) {
      for (std::size_t i = 0; i < n; ++i)
        a[i] = static_cast<std::uint64_t>((r >> (n - 1 - i)) & 1u);
    }
    return a;
  }
  const AxisCounts c = axis_counts(tag, l);
  bool has_odd = false;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t rem = n - 1 - i;
    const u128 all = pow_sat(c.values, rem);
    require_exact(all);
    if (has_odd) {
      a[i] = static_cast<std::uint64_t>(r / all);
      r %= all;
      continue;
    }
    const u128 even_block = all - pow_sat(c.evens, rem);
    const u128 pair = add_sat(even_block, all);
    require_exact(pair);
    const u128 s = r / pair;
    r -= s * pair;
    if (r < even_block) {
      a[i] = static_cast<std::uint64_t>(2 * s);
    } else {
      a[i] = static_cast<std::uint64_t>(2 * s + 1);
      r -= even_block;
      has_odd = true;
    }
  }
  return a;
}

u128 rank_in_depth(FamilyTag tag, int l, const std::vector<std::uint64_t>& a) {
  const std::size_t n = a.size();
  if (l == 0) {
    u128 r = 0;
    if (tag == FamilyTag::D1) {
      for (std::size_t i = 0; i < n; ++i) r = (r << 1) | a[i];
    }
    return r;
  }
  const AxisCounts c = axis_counts(tag, l);
  u128 r = 0;
  bool has_odd = false;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t rem = n - 1 - i;
    const u128 all = pow_sat(c.values, rem);
    require_exact(all);
    if (has_odd) {
      r = add_sat(r, mul_sat(a[i], all));
      continue;
    }
    const u128 even_block = all - pow_sat(c.evens, rem);
    const u128 pair = add_sat(even_block, all);
    r = add_sat(r, mul_sat(a[i] / 2, pair));
    if (a[i] % 2 == 1) {
      r = add_sat(r, even_block);
      has_odd = true;
    }
  }
  require_exact(r);
  return r;
}

FamilyPoint unrank(FamilyTag tag, std::uint64_t k, const FamilyConfig& cfg) {
  const std::size_t n = cfg.domain.dim();
  int l = 0;
  while (count_before(tag, l + 1, n) <= k) {
    ++l;
    if (l > kMaxFamilyDepth) throw IndexOverflowError("family rank too deep");
  }
  const u128 r = u128{k} - count_before(tag, l, n);
  FamilyPoint fp;
  fp.tag = tag;
  fp.depth = l;
  fp.numerators = unrank_in_depth(tag, l, n, r);
  fp.point = grid_coordinates(tag, l, fp.numerators, cfg);
  return fp;
}

// s (s + 1) / 2 without intermediate overflow for s < 2^64.
u128 triangular(u128 s) { return (s % 2 == 0) ? (s / 2) * (s + 1) : s * ((s + 1) / 2); }

}  // namespace

std::string FamilyIndex::to_string() const {
  if (value_ == 0) return "0";
  std::string s;
  u128 v = value_;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

FamilyIndex FamilyIndex::parse(const std::string& s) {
  if (s.empty()) throw ParseError("empty family index");
  u128 v = 0;
  for (char ch : s) {
    if (ch < '0' || ch > '9') throw ParseError("family index must be decimal: " + s);
    const u128 d = static_cast<u128>(ch - '0');
    if (v > (kU128Max - d) / 10) throw ParseError("family index overflow: " + s);
    v = v * 10 + d;
  }
  return FamilyIndex(v);
}

const char* tag_name(FamilyTag t) { return t == FamilyTag::D1 ? "D1" : "D2"; }

FamilyConfig::FamilyConfig(Domain d, double theta_)
    : domain(std::move(d)), theta(theta_) {
  if (!(theta > 0.0 && theta < 1.0)) throw ArgumentError("theta must lie in (0, 1)");
}

namespace {

double axis_coordinate(FamilyTag tag, int depth, std::uint64_t a, std::size_t i,
                       const FamilyConfig& cfg) {
  const double lo = cfg.domain.lo()[i], hi = cfg.domain.hi()[i];
  double t = std::ldexp(static_cast<double>(a), -depth);
  double c;
  if (tag == FamilyTag::D1) {
    c = (t >= 1.0) ? hi : lo + (hi - lo) * t;
  } else {
    t += cfg.theta;
    if (t >= 1.0) t -= 1.0;
    c = lo + (hi - lo) * t;
  }
  return std::clamp(c, lo, hi);
}

}  // namespace

Point grid_coordinates(FamilyTag tag, int depth,
                       const std::vector<std::uint64_t>& a,
                       const FamilyConfig& cfg) {
  std::vector<double> c(cfg.domain.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = axis_coordinate(tag, depth, a[i], i, cfg);
  return Point(std::move(c));
}

std::uint64_t family_rank(const FamilyPoint& p, std::size_t dim) {
  if (p.numerators.size() != dim) throw DomainError("family point dimension mismatch");
  std::vector<std::uint64_t> a = p.numerators;
  int l = p.depth;
  while (l > 0 && std::all_of(a.begin(), a.end(), [](std::uint64_t v) { return v % 2 == 0; })) {
    for (auto& v : a) v /= 2;
    --l;
  }
  const u128 before = count_before(p.tag, l, dim);
  require_exact(before);
  const u128 k = add_sat(before, rank_in_depth(p.tag, l, a));
  if (k > UINT64_MAX) throw IndexOverflowError("family rank exceeds 64 bits");
  return static_cast<std::uint64_t>(k);
}

FamilyPoint d1_point(std::uint64_t k, const FamilyConfig& cfg) {
  return unrank(FamilyTag::D1, k, cfg);
}

FamilyPoint d2_point(std::uint64_t k, const FamilyConfig& cfg) {
  return unrank(FamilyTag::D2, k, cfg);
}

FamilyPoint family_point(FamilyTag tag, std::uint64_t k, const FamilyConfig& cfg) {
  return unrank(tag, k, cfg);
}

FamilyIndex cantor_index(std::uint64_t x_rank, std::uint64_t y_rank) {
  const u128 s = u128{x_rank} + y_rank;
  if (s > UINT64_MAX) throw IndexOverflowError("pair index exceeds 128 bits");
  return FamilyIndex(triangular(s) + x_rank + 1);
}

std::pair<std::uint64_t, std::uint64_t> cantor_ranks(FamilyIndex j) {
  if (j.value() == 0) throw ArgumentError("pair index must be >= 1");
  const u128 t = j.value() - 1;
  u128 s = static_cast<u128>(std::sqrt(2.0L * static_cast<long double>(t)));
  while (s > 0 && triangular(s) > t) --s;
  while (s < UINT64_MAX && triangular(s + 1) <= t) ++s;
  const u128 a = t - triangular(s);
  if (s > UINT64_MAX) throw IndexOverflowError("pair index out of range");
  return {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(s - a)};
}

FamilyPair family_pair(FamilyIndex j, const FamilyConfig& cfg) {
  const auto [a, b] = cantor_ranks(j);
  FamilyPair p;
  p.index = j;
  p.x_rank = a;
  p.y_rank = b;
  p.x = d1_point(a, cfg);
  p.y = d2_point(b, cfg);
  p.separation = distance(p.x.point, p.y.point);
  if (!(p.separation > 0.0))
    throw IndexOverflowError("pair " + j.to_string() + " collapsed in floating point");
  return p;
}

FamilyIndex pair_index(const FamilyPoint& x, const FamilyPoint& y) {
  if (x.tag != FamilyTag::D1 || y.tag != FamilyTag::D2)
    throw ArgumentError("pair_index expects (D1, D2) points");
  return cantor_index(family_rank(x, x.numerators.size()),
                      family_rank(y, y.numerators.size()));
}

FamilyIndex dipole_atom_index(FamilyIndex pair) {
  return FamilyIndex(2 * pair.value() - 1);
}

FamilyIndex delta_atom_index(FamilyIndex pair) { return FamilyIndex(2 * pair.value()); }

DeltaAtom delta_atom(FamilyIndex j, const FamilyConfig& cfg) {
  if (j.value() == 0) throw ArgumentError("atom index must be >= 1");
  const FamilyIndex k((j.value() + 1) / 2);
  const FamilyPair p = family_pair(k, cfg);
  const bool is_dipole = j.value() % 2 == 1;
  std::vector<Atom> atoms;
  if (is_dipole) {
    atoms = {{p.x.point, 1.0 / p.separation}, {p.y.point, -1.0 / p.separation}};
  } else {
    atoms = {{p.x.point, 1.0}};
  }
  return {j, is_dipole ? AtomKind::Dipole : AtomKind::Delta, k,
          canonicalize(DiscreteSignedMeasure(cfg.domain, std::move(atoms)))};
}

Snap nearest_family_point(const Point& p, int depth, FamilyTag which,
                          const FamilyConfig& cfg) {
  const Domain& d = cfg.domain;
  d.require(p);
  if (depth < 0 || depth > kMaxFamilyDepth) throw ArgumentError("snap depth out of range");
  const std::size_t n = d.dim();
  const std::int64_t cells = std::int64_t{1} << depth;
  const double h = std::ldexp(1.0, -depth);
  // D2 grid values sorted: m*h + c0 with a = (m - q) mod 2^depth.
  const double scaled_theta = std::ldexp(cfg.theta, depth);
  const auto q = static_cast<std::int64_t>(std::floor(scaled_theta));
  const double c0 = cfg.theta - std::ldexp(static_cast<double>(q), -depth);

  FamilyPoint fp;
  fp.tag = which;
  fp.depth = depth;
  fp.numerators.assign(n, 0);
  std::vector<double> coords(n);
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = d.lo()[i], side = d.side(i);
    const double t = (p[i] - lo) / side;
    std::int64_t center;
    std::int64_t max_m;
    if (which == FamilyTag::D1) {
      center = static_cast<std::int64_t>(std::floor(std::ldexp(t, depth) + 0.5));
      max_m = cells;
    } else {
      center = static_cast<std::int64_t>(std::floor((t - c0) / h + 0.5));
      max_m = cells - 1;
    }
    double best_dist = std::numeric_limits<double>::infinity();
    double best_coord = 0.0;
    std::uint64_t best_a = 0;
    for (std::int64_t m = center - 1; m <= center + 1; ++m) {
      const std::int64_t mc = std::clamp<std::int64_t>(m, 0, max_m);
      std::uint64_t a;
      if (which == FamilyTag::D1) {
        a = static_cast<std::uint64_t>(mc);
      } else {
        a = static_cast<std::uint64_t>(((mc - q) % cells + cells) % cells);
      }
      const double c = axis_coordinate(which, depth, a, i, cfg);
      const double dist = std::abs(p[i] - c);
      if (dist < best_dist || (dist == best_dist && c < best_coord)) {
        best_dist = dist;
        best_coord = c;
        best_a = a;
      }
    }
    fp.numerators[i] = best_a;
    coords[i] = best_coord;
    const double diff = p[i] - best_coord;
    sq += diff * diff;
  }
  fp.point = Point(std::move(coords));
  return {std::move(fp), std::sqrt(sq)};
}

double snap_bound(int depth, FamilyTag which, const Domain& domain) {
  const double cell = std::ldexp(domain.max_side(), -depth);
  const double rn = std::sqrt(static_cast<double>(domain.dim()));
  return which == FamilyTag::D1 ? 0.5 * rn * cell : rn * cell;
}

std::optional<FamilyPoint> locate(const Point& p, FamilyTag which,
                                  const FamilyConfig& cfg) {
  if (!cfg.domain.contains(p)) return std::nullopt;
  for (int l = 0; l <= kLocateDepth; ++l) {
    Snap s = nearest_family_point(p, l, which, cfg);
    if (s.point.point == p) return std::move(s.point);
  }
  return std::nullopt;
}

}  // namespace krnorm
