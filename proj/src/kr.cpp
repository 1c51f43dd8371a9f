#include "krnorm/kr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "krnorm/dense_lp.hpp"
#include "krnorm/errors.hpp"
#include "krnorm/kernels.hpp"
#include "krnorm/measure_io.hpp"
#include "krnorm/transport.hpp"

namespace krnorm {
namespace {

struct PointLess {
  bool operator()(const Point& a, const Point& b) const { return a < b; }
};

struct Split {
  std::vector<Point> src_pts, snk_pts;
  std::vector<double> src_mass, snk_mass;  // both positive
};

Split split(const DiscreteSignedMeasure& c) {
  Split s;
  for (const Atom& a : c.atoms()) {
    if (a.weight < 0.0) {
      s.src_pts.push_back(a.point);
      s.src_mass.push_back(-a.weight);
    } else {
      s.snk_pts.push_back(a.point);
      s.snk_mass.push_back(a.weight);
    }
  }
  return s;
}

std::vector<Point> support(const DiscreteSignedMeasure& c) {
  std::vector<Point> pts;
  for (const Atom& a : c.atoms()) pts.push_back(a.point);
  return pts;
}

DualPotential make_potential(std::vector<Point> pts, std::vector<double> values) {
  DualPotential w;
  w.lip_bound = lipschitz_seminorm(pts, values);
  for (double v : values) w.sup_bound = std::max(w.sup_bound, std::abs(v));
  w.points = std::move(pts);
  w.values = std::move(values);
  return w;
}

DualPotential zero_potential(const DiscreteSignedMeasure& c) {
  return make_potential(support(c), std::vector<double>(c.size(), 0.0));
}

double dot(const DiscreteSignedMeasure& c, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += f[i] * c.atoms()[i].weight;
  return s;
}

// McShane extension from `from` with slope 1 evaluated at every atom of c;
// `upper` selects min_k(f_k + d), otherwise max_k(f_k - d).
std::vector<double> extend_to_support(const DiscreteSignedMeasure& c,
                                      const std::vector<Point>& from,
                                      const std::vector<double>& f, bool upper) {
  const std::size_t dim = c.domain().dim();
  const PointSet set(dim, from);
  std::vector<double> g = f;
  if (!upper) {
    for (double& x : g) x = -x;
  }
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double v = kernels::mcshane_min(c.atoms()[i].point.coords(), set, g, 1.0);
    out[i] = upper ? v : -v;
  }
  return out;
}

std::vector<double> cost_matrix(std::size_t dim, const std::vector<Point>& a,
                                const std::vector<Point>& b) {
  std::vector<double> d(a.size() * b.size());
  kernels::distance_matrix(PointSet(dim, a), PointSet(dim, b), d);
  return d;
}

transport::Solution run_transport(const transport::Problem& p, bool& used_fallback) {
  used_fallback = false;
  try {
    transport::Solution s = transport::solve(p);
    if (s.converged) return s;
  } catch (const SolverError&) {
  }
  used_fallback = true;
  return transport::solve_dense_lp(p);
}

void check_gap(const char* what, double gap, double tol) {
  if (!(gap <= tol)) {
    throw SolverError(std::string(what) + ": duality gap " + format_real(gap) +
                      " exceeds tolerance " + format_real(tol));
  }
}

}  // namespace

NormResult kr0_norm(const DiscreteSignedMeasure& m, double tol) {
  const DiscreteSignedMeasure c = canonicalize(m);
  NormResult r;
  if (c.empty()) return r;
  const double mass = total_mass(c);
  if (std::abs(mass) > kMassTol) {
    throw BalanceError("kr0_norm: measure is not balanced (total mass " +
                       format_real(mass) + ")");
  }
  const Split s = split(c);
  if (s.src_pts.empty() || s.snk_pts.empty()) {
    r.potential = zero_potential(c);
    return r;
  }
  const std::size_t dim = c.domain().dim();
  transport::Problem p{s.src_mass, s.snk_mass, cost_matrix(dim, s.src_pts, s.snk_pts)};
  bool fallback = false;
  const transport::Solution sol = run_transport(p, fallback);

  r.value = sol.cost;
  for (const transport::Cell& cell : sol.basis) {
    if (cell.mass > 0.0) {
      r.plan.edges.push_back(
          {s.src_pts[cell.row], s.snk_pts[cell.col], cell.mass, EdgeKind::Transport});
    }
  }

  std::vector<double> f;
  if (fallback) {
    f = kr0_dual(c, tol).witness.values;
  } else {
    std::vector<double> fs(s.src_pts.size());
    for (std::size_t i = 0; i < fs.size(); ++i) fs[i] = -sol.u[i];
    f = extend_to_support(c, s.src_pts, fs, true);
  }
  const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
  const double centre = 0.5 * (*lo + *hi);
  for (double& x : f) x -= centre;

  r.potential = make_potential(support(c), std::move(f));
  r.gap = std::abs(r.value - dot(c, r.potential.values));
  check_gap("kr0_norm", r.gap, tol);
  return r;
}

NormResult kr_norm(const DiscreteSignedMeasure& m, double tol) {
  const DiscreteSignedMeasure c = canonicalize(m);
  NormResult r;
  if (c.empty()) return r;
  const Split s = split(c);
  const std::size_t dim = c.domain().dim();
  const std::size_t ns = s.src_pts.size(), nt = s.snk_pts.size();

  // Row ns is the bank supplying created mass, column nt the bank absorbing
  // destroyed mass. The buffer keeps the bank-bank cell strictly basic.
  double sa = 0.0, sb = 0.0;
  for (double x : s.src_mass) sa += x;
  for (double x : s.snk_mass) sb += x;
  const double buffer = sa + sb;
  transport::Problem p;
  p.supply = s.src_mass;
  p.supply.push_back(sb + buffer);
  p.demand = s.snk_mass;
  p.demand.push_back(sa + buffer);
  const std::vector<double> d = cost_matrix(dim, s.src_pts, s.snk_pts);
  p.cost.assign((ns + 1) * (nt + 1), 1.0);
  for (std::size_t i = 0; i < ns; ++i) {
    std::copy_n(d.begin() + static_cast<std::ptrdiff_t>(i * nt), nt,
                p.cost.begin() + static_cast<std::ptrdiff_t>(i * (nt + 1)));
  }
  p.cost[ns * (nt + 1) + nt] = 0.0;

  bool fallback = false;
  const transport::Solution sol = run_transport(p, fallback);

  r.value = sol.cost;
  for (const transport::Cell& cell : sol.basis) {
    if (!(cell.mass > 0.0)) continue;
    if (cell.row < ns && cell.col < nt) {
      r.plan.edges.push_back(
          {s.src_pts[cell.row], s.snk_pts[cell.col], cell.mass, EdgeKind::Transport});
    } else if (cell.row == ns && cell.col < nt) {
      r.plan.edges.push_back(
          {s.snk_pts[cell.col], s.snk_pts[cell.col], cell.mass, EdgeKind::Create});
    } else if (cell.row < ns && cell.col == nt) {
      r.plan.edges.push_back(
          {s.src_pts[cell.row], s.src_pts[cell.row], cell.mass, EdgeKind::Destroy});
    }
  }

  std::vector<double> f;
  if (fallback) {
    f = kr_dual(c, tol).witness.values;
  } else {
    // Shift so the bank potentials vanish: then f <= 1 on sinks, f >= -1 on
    // sources.
    const double shift = sol.u[ns];
    if (ns > 0) {
      std::vector<double> fs(ns);
      for (std::size_t i = 0; i < ns; ++i) fs[i] = shift - sol.u[i];
      f = extend_to_support(c, s.src_pts, fs, true);
    } else {
      std::vector<double> ft(nt);
      for (std::size_t j = 0; j < nt; ++j) ft[j] = sol.v[j] + shift;
      f = extend_to_support(c, s.snk_pts, ft, false);
    }
    for (double& x : f) x = std::clamp(x, -1.0, 1.0);
  }

  r.potential = make_potential(support(c), std::move(f));
  r.gap = std::abs(r.value - dot(c, r.potential.values));
  check_gap("kr_norm", r.gap, tol);
  return r;
}

namespace {

// max sum_i w_i f_i over |f_i - f_j| <= d_ij and -bound <= f_i <= bound,
// as an LP in g = f + bound >= 0. Pair rows with d_ij >= 2 bound are implied
// by the box and omitted. Large supports start from nearest-neighbour rows
// and add violated pairs until none remain.
DualResult lipschitz_lp(const DiscreteSignedMeasure& c, double bound) {
  const std::size_t n = c.size();
  const std::size_t dim = c.domain().dim();
  const std::vector<Point> pts = support(c);
  std::vector<double> d(n * n);
  const PointSet set(dim, pts);
  kernels::distance_matrix(set, set, d);

  std::vector<std::pair<std::size_t, std::size_t>> rows;
  std::vector<bool> active(n * n, false);
  auto add = [&](std::size_t i, std::size_t j) {
    if (i == j || active[i * n + j] || d[i * n + j] >= 2.0 * bound) return;
    active[i * n + j] = true;
    rows.emplace_back(i, j);
  };
  constexpr std::size_t kAllPairsUpTo = 24;
  constexpr std::size_t kNeighbours = 6;
  if (n <= kAllPairsUpTo) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) add(i, j);
    }
  } else {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) order[j] = j;
      std::partial_sort(order.begin(), order.begin() + kNeighbours + 1, order.end(),
                        [&](std::size_t a, std::size_t b) {
                          return d[i * n + a] < d[i * n + b];
                        });
      for (std::size_t k = 0; k <= kNeighbours; ++k) {
        add(i, order[k]);
        add(order[k], i);
      }
    }
  }

  std::vector<double> f(n, 0.0);
  for (int round = 0;; ++round) {
    if (round > 200) throw SolverError("dual LP: cutting planes did not converge");
    lp::Problem q;
    q.num_vars = n;
    q.sense = lp::Sense::Maximize;
    for (const Atom& a : c.atoms()) q.objective.push_back(a.weight);
    for (std::size_t i = 0; i < n; ++i) {
      lp::Constraint row{std::vector<double>(n, 0.0), lp::Relation::LessEqual, 2.0 * bound};
      row.coeffs[i] = 1.0;
      q.constraints.push_back(std::move(row));
    }
    for (const auto& [i, j] : rows) {
      lp::Constraint row{std::vector<double>(n, 0.0), lp::Relation::LessEqual, d[i * n + j]};
      row.coeffs[i] = 1.0;
      row.coeffs[j] = -1.0;
      q.constraints.push_back(std::move(row));
    }
    const lp::Solution s = lp::solve(q);
    if (s.status != lp::Status::Optimal) throw SolverError("dual LP not optimal");
    for (std::size_t i = 0; i < n; ++i) f[i] = s.x[i] - bound;

    const std::size_t before = rows.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && !active[i * n + j] && f[i] - f[j] > d[i * n + j] + kFeasibilityTol) {
          add(i, j);
        }
      }
    }
    if (rows.size() == before) break;
  }

  DualResult r;
  r.value = dot(c, f);
  r.witness = make_potential(pts, std::move(f));
  return r;
}

}  // namespace

DualResult kr0_dual(const DiscreteSignedMeasure& m, double tol) {
  (void)tol;
  const DiscreteSignedMeasure c = canonicalize(m);
  if (c.empty()) return {};
  const double mass = total_mass(c);
  if (std::abs(mass) > kMassTol) {
    throw BalanceError("kr0_dual: measure is not balanced (total mass " +
                       format_real(mass) + ")");
  }
  double spread = 0.0;
  for (const Atom& a : c.atoms()) {
    spread = std::max(spread, distance(a.point, c.atoms()[0].point));
  }
  if (spread == 0.0) return {0.0, zero_potential(c)};
  // Every 1-Lipschitz f on the support can be shifted into [-spread, spread].
  return lipschitz_lp(c, spread);
}

DualResult kr_dual(const DiscreteSignedMeasure& m, double tol) {
  (void)tol;
  const DiscreteSignedMeasure c = canonicalize(m);
  if (c.empty()) return {};
  return lipschitz_lp(c, 1.0);
}

double mcshane_extend(const DualPotential& w, const Point& z, std::optional<double> clip) {
  if (w.points.empty()) throw ArgumentError("mcshane_extend: empty potential");
  if (w.values.size() != w.points.size())
    throw ArgumentError("mcshane_extend: value count mismatch");
  const PointSet set(z.dim(), w.points);
  double v = kernels::mcshane_min(z.coords(), set, w.values, w.lip_bound);
  if (clip) v = std::clamp(v, -*clip, *clip);
  return v;
}

double lipschitz_seminorm(std::span<const Point> points, std::span<const double> values) {
  if (points.size() != values.size())
    throw ArgumentError("lipschitz_seminorm: value count mismatch");
  if (points.size() < 2) return 0.0;
  const PointSet set(points[0].dim(), points);
  const kernels::LipschitzScan scan = kernels::max_lipschitz_ratio(set, values);
  if (scan.has_duplicate) throw ArgumentError("lipschitz_seminorm: duplicated points");
  return scan.ratio;
}

double lip_norm(std::span<const Point> points, std::span<const double> values) {
  double n = lipschitz_seminorm(points, values);
  for (double v : values) n = std::max(n, std::abs(v));
  return n;
}

double pairing(const DualPotential& w, const DiscreteSignedMeasure& m,
               std::optional<double> clip) {
  std::map<Point, double, PointLess> known;
  for (std::size_t i = 0; i < w.points.size(); ++i) known.emplace(w.points[i], w.values[i]);
  double s = 0.0;
  for (const Atom& a : m.atoms()) {
    const auto it = known.find(a.point);
    const double f = it != known.end() ? it->second : mcshane_extend(w, a.point, clip);
    s += f * a.weight;
  }
  return s;
}

double plan_balance_error(const TransportPlan& plan, const DiscreteSignedMeasure& m) {
  std::map<Point, double, PointLess> net;
  for (const Atom& a : m.atoms()) net[a.point] -= a.weight;
  for (const PlanEdge& e : plan.edges) {
    switch (e.kind) {
      case EdgeKind::Transport:
        net[e.target] += e.mass;
        net[e.source] -= e.mass;
        break;
      case EdgeKind::Create:
        net[e.target] += e.mass;
        break;
      case EdgeKind::Destroy:
        net[e.source] -= e.mass;
        break;
    }
  }
  double worst = 0.0;
  for (const auto& [p, v] : net) worst = std::max(worst, std::abs(v));
  return worst;
}

}  // namespace krnorm
