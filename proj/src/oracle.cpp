#include "krnorm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "krnorm/errors.hpp"

namespace krnorm {
namespace {

// Unit copies grouped by point.
struct Groups {
  std::vector<Point> points;
  std::vector<std::size_t> counts;
  std::size_t units = 0;
};

Groups group(const std::vector<Point>& units) {
  Groups g;
  for (const Point& p : units) {
    if (!g.points.empty() && g.points.back() == p) {
      ++g.counts.back();
    } else {
      g.points.push_back(p);
      g.counts.push_back(1);
    }
    ++g.units;
  }
  return g;
}

// Assigns source units one at a time to a sink group (or to the bank when
// `bank_cost` is finite). Costs are in units of q.
class MatchingSearch {
 public:
  MatchingSearch(const Groups& src, const Groups& snk, double bank_cost)
      : src_(src), snk_(snk), bank_(bank_cost), remaining_(snk.counts) {
    for (std::size_t i = 0; i < src.points.size(); ++i) {
      for (std::size_t c = 0; c < src.counts[i]; ++c) unit_group_.push_back(i);
    }
    cost_.resize(src.points.size() * snk.points.size());
    cheapest_.assign(src.points.size(), bank_);
    for (std::size_t i = 0; i < src.points.size(); ++i) {
      for (std::size_t j = 0; j < snk.points.size(); ++j) {
        const double d = distance(src.points[i], snk.points[j]);
        cost_[i * snk.points.size() + j] = d;
        cheapest_[i] = std::min(cheapest_[i], d);
      }
    }
    // Suffix sums of the per-unit cheapest option.
    tail_.assign(unit_group_.size() + 1, 0.0);
    for (std::size_t u = unit_group_.size(); u-- > 0;) {
      tail_[u] = tail_[u + 1] + cheapest_[unit_group_[u]];
    }
  }

  double run() {
    best_ = greedy();
    choice_.assign(unit_group_.size(), 0);
    descend(0, 0.0, snk_.units);
    return best_;
  }

 private:
  std::size_t bank_slot() const { return snk_.points.size(); }

  // Sinks left unmatched at the end are created at bank cost.
  double closing_cost(std::size_t sinks_left) const {
    return static_cast<double>(sinks_left) * bank_;
  }

  double greedy() {
    std::vector<std::size_t> rem = snk_.counts;
    std::size_t left = snk_.units;
    double total = 0.0;
    for (std::size_t g : unit_group_) {
      double best = std::isfinite(bank_) ? bank_ : std::numeric_limits<double>::infinity();
      std::size_t arg = bank_slot();
      for (std::size_t j = 0; j < snk_.points.size(); ++j) {
        if (rem[j] > 0 && cost_[g * snk_.points.size() + j] < best) {
          best = cost_[g * snk_.points.size() + j];
          arg = j;
        }
      }
      if (arg != bank_slot()) {
        --rem[arg];
        --left;
      }
      total += best;
    }
    return total + (left > 0 ? closing_cost(left) : 0.0);
  }

  void descend(std::size_t u, double partial, std::size_t sinks_left) {
    const std::size_t units_left = unit_group_.size() - u;
    double bound = partial + tail_[u];
    if (std::isfinite(bank_) && sinks_left > units_left) {
      bound += closing_cost(sinks_left - units_left);
    }
    if (bound >= best_) return;
    if (u == unit_group_.size()) {
      best_ = partial + (sinks_left > 0 ? closing_cost(sinks_left) : 0.0);
      return;
    }
    const std::size_t g = unit_group_[u];
    // Units of one source group take nondecreasing choices.
    const std::size_t first = (u > 0 && unit_group_[u - 1] == g) ? choice_[u - 1] : 0;
    const std::size_t n = snk_.points.size();
    for (std::size_t j = first; j < n; ++j) {
      if (remaining_[j] == 0) continue;
      --remaining_[j];
      choice_[u] = j;
      descend(u + 1, partial + cost_[g * n + j], sinks_left - 1);
      ++remaining_[j];
    }
    if (std::isfinite(bank_)) {
      choice_[u] = bank_slot();
      descend(u + 1, partial + bank_, sinks_left);
    }
  }

  const Groups& src_;
  const Groups& snk_;
  double bank_;
  std::vector<std::size_t> remaining_;
  std::vector<std::size_t> unit_group_;
  std::vector<double> cost_;
  std::vector<double> cheapest_;
  std::vector<double> tail_;
  std::vector<std::size_t> choice_;
  double best_ = 0.0;
};

}  // namespace

QuantizedInstance quantize(const DiscreteSignedMeasure& m, double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw ArgumentError("oracle: unit must be positive");
  const DiscreteSignedMeasure c = canonicalize(m);
  QuantizedInstance inst;
  inst.unit = q;
  for (const Atom& a : c.atoms()) {
    const double count = std::round(std::abs(a.weight) / q);
    if (std::abs(count * q - std::abs(a.weight)) > kQuantizationTol || count < 1.0) {
      throw ArgumentError("oracle: weight " + std::to_string(a.weight) +
                          " is not a multiple of the unit");
    }
    if (count > static_cast<double>(kOracleMaxUnits)) {
      throw OracleLimitError("oracle: more than " + std::to_string(kOracleMaxUnits) +
                             " units at one point");
    }
    auto& side = a.weight < 0.0 ? inst.sources : inst.sinks;
    side.insert(side.end(), static_cast<std::size_t>(count), a.point);
  }
  if (inst.sources.size() > kOracleMaxUnits || inst.sinks.size() > kOracleMaxUnits) {
    throw OracleLimitError("oracle: more than " + std::to_string(kOracleMaxUnits) +
                           " units per side");
  }
  return inst;
}

double oracle_kr0(const DiscreteSignedMeasure& m, double q) {
  const QuantizedInstance inst = quantize(m, q);
  if (inst.sources.size() != inst.sinks.size()) {
    throw BalanceError("oracle_kr0: unit counts differ (" +
                       std::to_string(inst.sources.size()) + " vs " +
                       std::to_string(inst.sinks.size()) + ")");
  }
  if (inst.sources.empty()) return 0.0;
  const Groups src = group(inst.sources), snk = group(inst.sinks);
  MatchingSearch search(src, snk, std::numeric_limits<double>::infinity());
  return q * search.run();
}

double oracle_kr(const DiscreteSignedMeasure& m, double q) {
  const QuantizedInstance inst = quantize(m, q);
  if (inst.sources.empty() && inst.sinks.empty()) return 0.0;
  const Groups src = group(inst.sources), snk = group(inst.sinks);
  MatchingSearch search(src, snk, 1.0);
  return q * search.run();
}

double oracle_dual_grid(const DiscreteSignedMeasure& m, int grid_depth) {
  const DiscreteSignedMeasure c = canonicalize(m);
  if (c.size() > kOracleMaxSupport)
    throw OracleLimitError("oracle_dual_grid: support larger than " +
                           std::to_string(kOracleMaxSupport));
  if (grid_depth < 0 || grid_depth > kOracleMaxGridDepth)
    throw OracleLimitError("oracle_dual_grid: grid depth outside [0, " +
                           std::to_string(kOracleMaxGridDepth) + "]");
  if (std::abs(total_mass(c)) > 1e-10)
    throw BalanceError("oracle_dual_grid: measure is not balanced");
  if (c.size() < 2) return 0.0;

  const std::size_t n = c.size();
  double spread = 0.0;
  for (const Atom& a : c.atoms()) spread = std::max(spread, distance(a.point, c.atoms()[0].point));
  const long steps = 2L << grid_depth;  // grid has steps + 1 values
  const double h = spread / static_cast<double>(steps / 2);

  std::vector<double> f(n, 0.0);
  double best = 0.0;  // f = 0 is feasible
  // Depth-first over the free values with pairwise feasibility pruning.
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += f[k] * c.atoms()[k].weight;
      best = std::max(best, s);
      return;
    }
    for (long k = 0; k <= steps; ++k) {
      f[i] = -spread + static_cast<double>(k) * h;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) {
        ok = std::abs(f[i] - f[j]) <= distance(c.atoms()[i].point, c.atoms()[j].point);
      }
      if (ok) self(self, i + 1);
    }
  };
  rec(rec, 1);
  return best;
}

}  // namespace krnorm
