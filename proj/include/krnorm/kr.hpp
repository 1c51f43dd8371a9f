#pragma once

// Kantorovich-Rubinstein norms of finitely supported signed measures.
//
// kr0_norm: balanced measures, optimal transport of the negative part onto
// the positive part with Euclidean cost. kr_norm: any measure; a bank node
// creates or destroys mass at unit cost. Both return an attaining plan and a
// potential f on the support whose pairing <f, m> certifies the value from
// below.
//
// kr0_dual and kr_dual solve the Lipschitz-ball programs directly as dense
// LPs and share no code with the primal route.

#include <optional>
#include <span>
#include <vector>

#include "krnorm/measure.hpp"

namespace krnorm {

inline constexpr double kDefaultGapTol = 1e-8;
inline constexpr double kMassTol = 1e-10;
inline constexpr double kFeasibilityTol = 1e-12;

enum class EdgeKind { Transport, Create, Destroy };

/// One unit of the plan. Transport edges move mass from source to target.
/// Create edges add mass at `target` and Destroy edges remove mass at
/// `source`; for those the other endpoint repeats the same point.
struct PlanEdge {
  Point source;
  Point target;
  double mass = 0.0;
  EdgeKind kind = EdgeKind::Transport;
};

struct TransportPlan {
  std::vector<PlanEdge> edges;
};

struct DualPotential {
  std::vector<Point> points;
  std::vector<double> values;
  double lip_bound = 0.0;
  double sup_bound = 0.0;
};

struct NormResult {
  double value = 0.0;
  TransportPlan plan;
  DualPotential potential;
  double gap = 0.0;
};

struct DualResult {
  double value = 0.0;
  DualPotential witness;
};

/// Throws BalanceError when |m(K)| > kMassTol, SolverError when the
/// certified gap exceeds tol.
NormResult kr0_norm(const DiscreteSignedMeasure& m, double tol = kDefaultGapTol);
NormResult kr_norm(const DiscreteSignedMeasure& m, double tol = kDefaultGapTol);

DualResult kr0_dual(const DiscreteSignedMeasure& m, double tol = kDefaultGapTol);
DualResult kr_dual(const DiscreteSignedMeasure& m, double tol = kDefaultGapTol);

/// min_i (f_i + lip_bound |z - p_i|), clipped to [-clip, clip].
/// Throws ArgumentError on an empty potential.
double mcshane_extend(const DualPotential& w, const Point& z,
                      std::optional<double> clip = std::nullopt);

/// Exact max of |f_i - f_j| / |p_i - p_j|. Throws ArgumentError on
/// duplicated points.
double lipschitz_seminorm(std::span<const Point> points, std::span<const double> values);
/// max(seminorm, max |f_i|).
double lip_norm(std::span<const Point> points, std::span<const double> values);

/// sum_i f(p_i) w_i with f given by the potential's values on m's support
/// points, extended by mcshane_extend off the potential's points.
double pairing(const DualPotential& w, const DiscreteSignedMeasure& m,
               std::optional<double> clip = std::nullopt);

/// Largest per-point violation of inflow - outflow + created - destroyed
/// = m(E) over the support of m and of the plan.
double plan_balance_error(const TransportPlan& plan, const DiscreteSignedMeasure& m);

}  // namespace krnorm
