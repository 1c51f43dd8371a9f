#include "krnorm/decompose.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "krnorm/dense_lp.hpp"
#include "krnorm/errors.hpp"
#include "krnorm/kr.hpp"
#include "krnorm/measure_io.hpp"

namespace krnorm {

using nlohmann::json;

namespace {

struct PointLess {
  bool operator()(const Point& a, const Point& b) const { return a < b; }
};

constexpr int kMaxBudgetHalvings = 30;

void require_setup(const DiscreteSignedMeasure& m, double tol, const FamilyConfig& cfg) {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw ArgumentError("tolerance must be positive");
  if (!(m.domain() == cfg.domain))
    throw DomainError("measure and family live on different boxes");
}

void require_balanced(const DiscreteSignedMeasure& c, const char* what) {
  const double mass = total_mass(c);
  if (std::abs(mass) > kMassTol) {
    throw BalanceError(std::string(what) + ": measure is not balanced (total mass " +
                       format_real(mass) + ")");
  }
}

// Shortest round-trip digits, for messages.
std::string point_text(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (i) s += ", ";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, p[i]);
    s.append(buf, res.ptr);
  }
  return s + ")";
}

// Builds the dipole chains for plan edges. All emitted terms are expressed
// as k (delta_a - delta_b) with a, b family points of opposite tags.
class ChainBuilder {
 public:
  ChainBuilder(const FamilyConfig& cfg, int start_depth, double budget)
      : cfg_(cfg), start_(start_depth), budget_(budget) {}

  // c (delta_u - delta_v), c > 0.
  void add_edge(const Point& u, const Point& v, double c) {
    const double len = distance(u, v);
    if (c * len <= 2.0 * budget_) return;
    const auto& u1 = member(u, FamilyTag::D1);
    const auto& u2 = member(u, FamilyTag::D2);
    const auto& v1 = member(v, FamilyTag::D1);
    const auto& v2 = member(v, FamilyTag::D2);
    if (u1 && v2) return emit(*u1, *v2, c);
    if (u2 && v1) return emit(*u2, *v1, c);
    for (int l = start_; l <= kMaxFamilyDepth; ++l) {
      const FamilyPoint x = u1 ? *u1 : nearest_family_point(u, l, FamilyTag::D1, cfg_).point;
      const FamilyPoint y = v2 ? *v2 : nearest_family_point(v, l, FamilyTag::D2, cfg_).point;
      if (distance(u, x.point) + distance(v, y.point) < len) {
        emit(x, y, c);
        chain(c, u, x, l);
        chain(-c, v, y, l);
        return;
      }
    }
    throw SolverError("decompose: no family pair improves the edge " + point_text(u) +
                      " <- " + point_text(v));
  }

  std::map<FamilyIndex, double>& terms() { return terms_; }

 private:
  // Exact family membership, cached per point.
  const std::optional<FamilyPoint>& member(const Point& p, FamilyTag t) {
    auto& cache = t == FamilyTag::D1 ? in_d1_ : in_d2_;
    auto it = cache.find(p);
    if (it == cache.end()) it = cache.emplace(p, locate(p, t, cfg_)).first;
    return it->second;
  }

  // k (delta_a - delta_b).
  void emit(const FamilyPoint& a, const FamilyPoint& b, double k) {
    const double sep = distance(a.point, b.point);
    if (a.tag == FamilyTag::D1) {
      terms_[pair_index(a, b)] += k * sep;
    } else {
      terms_[pair_index(b, a)] -= k * sep;
    }
  }

  // Walks the residual c (delta_p - delta_a) towards p.
  void chain(double c, const Point& p, FamilyPoint a, int depth) {
    while (true) {
      const double r = distance(p, a.point);
      if (r == 0.0 || std::abs(c) * r <= budget_) return;
      const FamilyTag t = opposite(a.tag);
      if (const auto& hit = member(p, t)) return emit(*hit, a, c);
      std::optional<FamilyPoint> next;
      for (int l = depth + 1; l <= kMaxFamilyDepth && !next; ++l) {
        Snap s = nearest_family_point(p, l, t, cfg_);
        if (s.distance < r) {
          next = std::move(s.point);
          depth = l;
        }
      }
      if (!next) throw SolverError("decompose: chain towards " + point_text(p) + " stalled");
      emit(*next, a, c);
      a = std::move(*next);
    }
  }

  const FamilyConfig& cfg_;
  int start_;
  double budget_;
  std::map<FamilyIndex, double> terms_;
  std::map<Point, std::optional<FamilyPoint>, PointLess> in_d1_, in_d2_;
};

double l1_of(const std::vector<DipoleTerm>& t) {
  double s = 0.0;
  for (const auto& x : t) s += std::abs(x.alpha);
  return s;
}

double l1_of(const std::vector<FullTerm>& t) {
  double s = 0.0;
  for (const auto& x : t) s += std::abs(x.alpha1) + std::abs(x.alpha2);
  return s;
}

// Pair points of the truncated family, indexed for the exact-equality rows.
struct Truncation {
  std::vector<FamilyPair> pairs;
  std::map<Point, std::size_t, PointLess> row_of;
};

Truncation truncate_family(const DiscreteSignedMeasure& c, std::uint64_t n_pairs,
                           const FamilyConfig& cfg, bool deltas) {
  if (n_pairs == 0) throw ArgumentError("truncation size must be positive");
  Truncation t;
  for (std::uint64_t j = 1; j <= n_pairs; ++j) {
    t.pairs.push_back(family_pair(FamilyIndex(j), cfg));
    t.row_of.emplace(t.pairs.back().x.point, t.row_of.size());
    t.row_of.emplace(t.pairs.back().y.point, t.row_of.size());
  }
  std::string missing;
  for (const Atom& a : c.atoms()) {
    if (!t.row_of.count(a.point)) missing += (missing.empty() ? "" : ", ") + point_text(a.point);
  }
  if (!missing.empty()) {
    throw InfeasibleError(std::string("support points outside the first ") +
                          std::to_string(n_pairs) + " pairs" +
                          (deltas ? "" : " (dipoles only)") + ": " + missing);
  }
  return t;
}

lp::Problem l1_program(const DiscreteSignedMeasure& c, const Truncation& t, bool deltas) {
  const std::size_t n = t.pairs.size();
  const std::size_t per = deltas ? 4 : 2;  // (alpha1+, alpha1-, alpha2+, alpha2-)
  lp::Problem q;
  q.num_vars = per * n;
  q.sense = lp::Sense::Minimize;
  q.objective.assign(q.num_vars, 1.0);
  q.constraints.assign(t.row_of.size(),
                       lp::Constraint{std::vector<double>(q.num_vars, 0.0),
                                      lp::Relation::Equal, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    const FamilyPair& p = t.pairs[k];
    const std::size_t rx = t.row_of.at(p.x.point), ry = t.row_of.at(p.y.point);
    const double w = 1.0 / p.separation;
    q.constraints[rx].coeffs[per * k] += w;
    q.constraints[rx].coeffs[per * k + 1] -= w;
    q.constraints[ry].coeffs[per * k] -= w;
    q.constraints[ry].coeffs[per * k + 1] += w;
    if (deltas) {
      q.constraints[rx].coeffs[per * k + 2] += 1.0;
      q.constraints[rx].coeffs[per * k + 3] -= 1.0;
    }
  }
  for (const Atom& a : c.atoms()) q.constraints[t.row_of.at(a.point)].rhs = a.weight;
  return q;
}

lp::Solution solve_l1(const lp::Problem& q, std::uint64_t n_pairs) {
  const lp::Solution s = lp::solve(q);
  if (s.status != lp::Status::Optimal) {
    throw InfeasibleError("no exact representation over the first " +
                          std::to_string(n_pairs) + " pairs");
  }
  return s;
}

json index_json(FamilyIndex j) {
  if (j.fits_u64()) return json(static_cast<std::uint64_t>(j.value()));
  return json(j.to_string());
}

FamilyIndex index_from_json(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return FamilyIndex(j.get<std::uint64_t>());
  if (j.is_number_integer() && j.get<long long>() > 0)
    return FamilyIndex(static_cast<std::uint64_t>(j.get<long long>()));
  if (j.is_string()) {
    try {
      return FamilyIndex::parse(j.get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  throw ParseError(where + ": expected a positive pair index");
}

double real_field(const json& j, const char* name, const std::string& where) {
  const auto it = j.find(name);
  if (it == j.end()) throw ParseError(where + ": missing field '" + name + "'");
  if (!it->is_number()) throw ParseError(where + "." + name + ": expected a number");
  return it->get<double>();
}

template <class Dec>
json common_json(const Dec& dec, const char* variant) {
  return json{{"variant", variant},
              {"method", method_name(dec.method)},
              {"start_depth", dec.start_depth},
              {"theta", dec.family.theta},
              {"target", measure_to_json(dec.target)},
              {"norm", dec.norm},
              {"l1", dec.l1},
              {"residual_norm", dec.residual_norm},
              {"ratio", dec.ratio()}};
}

}  // namespace

const char* method_name(DecompositionMethod m) {
  return m == DecompositionMethod::Greedy ? "greedy" : "l1";
}

double AtomicDecomposition::alpha2_sum() const {
  double s = 0.0;
  for (const FullTerm& t : terms) s += t.alpha2;
  return s;
}

AtomicDecomposition0 decompose_balanced(const DiscreteSignedMeasure& m, double tol,
                                        const FamilyConfig& cfg,
                                        const DecomposeOptions& opt) {
  require_setup(m, tol, cfg);
  if (opt.start_depth < 0 || opt.start_depth > kMaxFamilyDepth)
    throw ArgumentError("start depth out of range");
  const DiscreteSignedMeasure c = canonicalize(m);
  require_balanced(c, "decompose_balanced");
  AtomicDecomposition0 dec{{}, 0.0, 0.0, 0.0, cfg, DecompositionMethod::Greedy,
                           opt.start_depth, c};
  if (c.empty()) return dec;

  const NormResult plan = kr0_norm(c);
  dec.norm = plan.value;
  const std::size_t edges = std::max<std::size_t>(1, plan.plan.edges.size());
  double budget = 0.25 * tol / static_cast<double>(edges);
  for (int attempt = 0; attempt <= kMaxBudgetHalvings; ++attempt, budget *= 0.5) {
    ChainBuilder builder(cfg, opt.start_depth, budget);
    for (const PlanEdge& e : plan.plan.edges) builder.add_edge(e.target, e.source, e.mass);
    dec.terms.clear();
    for (const auto& [j, a] : builder.terms()) {
      if (a != 0.0) dec.terms.push_back({j, a});
    }
    dec.l1 = l1_of(dec.terms);
    dec.residual_norm = kr0_norm(c - reconstruct(dec)).value;
    if (dec.residual_norm <= tol) return dec;
  }
  throw SolverError("decompose_balanced: residual above tolerance after budget halving");
}

AtomicDecomposition decompose_full(const DiscreteSignedMeasure& m, double tol,
                                   const FamilyConfig& cfg, const DecomposeOptions& opt) {
  require_setup(m, tol, cfg);
  const DiscreteSignedMeasure c = canonicalize(m);
  AtomicDecomposition dec{{}, 0.0, 0.0, 0.0, cfg, DecompositionMethod::Greedy,
                          opt.start_depth, c};
  if (c.empty()) return dec;
  dec.norm = kr_norm(c).value;

  // Delta terms sit on pairs (x, d2(0)); the swap p -> x is left as a
  // balanced discrepancy.
  const FamilyPoint anchor = d2_point(0, cfg);
  std::map<FamilyIndex, double> alpha2;
  std::vector<Atom> discrepancy;
  for (const Atom& a : c.atoms()) {
    std::optional<FamilyPoint> x = locate(a.point, FamilyTag::D1, cfg);
    if (!x) x = nearest_family_point(a.point, opt.start_depth, FamilyTag::D1, cfg).point;
    alpha2[pair_index(*x, anchor)] += a.weight;
    discrepancy.push_back({a.point, a.weight});
    discrepancy.push_back({x->point, -a.weight});
  }
  const DiscreteSignedMeasure rest = canonicalize(DiscreteSignedMeasure(cfg.domain, discrepancy));

  double btol = tol;
  for (int attempt = 0; attempt <= kMaxBudgetHalvings; ++attempt, btol *= 0.5) {
    std::map<FamilyIndex, FullTerm> merged;
    for (const auto& [j, a] : alpha2) merged[j] = FullTerm{j, 0.0, a};
    if (!rest.empty()) {
      const AtomicDecomposition0 part = decompose_balanced(rest, btol, cfg, opt);
      for (const DipoleTerm& t : part.terms) {
        FullTerm& f = merged[t.pair];
        f.pair = t.pair;
        f.alpha1 += t.alpha;
      }
    }
    dec.terms.clear();
    for (const auto& [j, t] : merged) {
      if (t.alpha1 != 0.0 || t.alpha2 != 0.0) dec.terms.push_back(t);
    }
    dec.l1 = l1_of(dec.terms);
    dec.residual_norm = kr_norm(c - reconstruct(dec)).value;
    if (dec.residual_norm <= tol) return dec;
  }
  throw SolverError("decompose_full: residual above tolerance");
}

AtomicDecomposition0 decompose_l1_minimal_balanced(const DiscreteSignedMeasure& m,
                                                   std::uint64_t n_pairs,
                                                   const FamilyConfig& cfg) {
  if (!(m.domain() == cfg.domain))
    throw DomainError("measure and family live on different boxes");
  const DiscreteSignedMeasure c = canonicalize(m);
  require_balanced(c, "decompose_l1_minimal");
  const Truncation t = truncate_family(c, n_pairs, cfg, false);
  const lp::Solution s = solve_l1(l1_program(c, t, false), n_pairs);
  AtomicDecomposition0 dec{{}, 0.0, 0.0, 0.0, cfg, DecompositionMethod::L1Minimal, 0, c};
  for (std::size_t k = 0; k < t.pairs.size(); ++k) {
    const double a = s.x[2 * k] - s.x[2 * k + 1];
    if (a != 0.0) dec.terms.push_back({t.pairs[k].index, a});
  }
  dec.l1 = l1_of(dec.terms);
  dec.norm = c.empty() ? 0.0 : kr0_norm(c).value;
  dec.residual_norm = kr0_norm(c - reconstruct(dec)).value;
  return dec;
}

AtomicDecomposition decompose_l1_minimal_full(const DiscreteSignedMeasure& m,
                                              std::uint64_t n_pairs,
                                              const FamilyConfig& cfg) {
  if (!(m.domain() == cfg.domain))
    throw DomainError("measure and family live on different boxes");
  const DiscreteSignedMeasure c = canonicalize(m);
  const Truncation t = truncate_family(c, n_pairs, cfg, true);
  const lp::Solution s = solve_l1(l1_program(c, t, true), n_pairs);
  AtomicDecomposition dec{{}, 0.0, 0.0, 0.0, cfg, DecompositionMethod::L1Minimal, 0, c};
  for (std::size_t k = 0; k < t.pairs.size(); ++k) {
    const double a1 = s.x[4 * k] - s.x[4 * k + 1];
    const double a2 = s.x[4 * k + 2] - s.x[4 * k + 3];
    if (a1 != 0.0 || a2 != 0.0) dec.terms.push_back({t.pairs[k].index, a1, a2});
  }
  dec.l1 = l1_of(dec.terms);
  dec.norm = kr_norm(c).value;
  dec.residual_norm = kr_norm(c - reconstruct(dec)).value;
  return dec;
}

DiscreteSignedMeasure reconstruct(const AtomicDecomposition0& dec,
                                  std::optional<std::size_t> prefix) {
  const std::size_t n = prefix.value_or(dec.terms.size());
  if (n > dec.terms.size()) throw ArgumentError("prefix exceeds the number of terms");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) {
    const FamilyPair p = family_pair(dec.terms[i].pair, dec.family);
    const double w = dec.terms[i].alpha / p.separation;
    atoms.push_back({p.x.point, w});
    atoms.push_back({p.y.point, -w});
  }
  return canonicalize(DiscreteSignedMeasure(dec.family.domain, std::move(atoms)));
}

DiscreteSignedMeasure reconstruct(const AtomicDecomposition& dec,
                                  std::optional<std::size_t> prefix) {
  const std::size_t n = prefix.value_or(dec.terms.size());
  if (n > dec.terms.size()) throw ArgumentError("prefix exceeds the number of terms");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) {
    const FullTerm& t = dec.terms[i];
    const FamilyPair p = family_pair(t.pair, dec.family);
    if (t.alpha1 != 0.0) {
      const double w = t.alpha1 / p.separation;
      atoms.push_back({p.x.point, w});
      atoms.push_back({p.y.point, -w});
    }
    if (t.alpha2 != 0.0) atoms.push_back({p.x.point, t.alpha2});
  }
  return canonicalize(DiscreteSignedMeasure(dec.family.domain, std::move(atoms)));
}

double testfn_eval(FamilyIndex j, double alpha1, double alpha2, const Point& z,
                   const FamilyConfig& cfg) {
  const FamilyPair p = family_pair(j, cfg);
  const double r = distance(p.x.point, z);
  const double scale = cfg.domain.diameter() + 1.0;
  if (alpha1 >= 0.0 && alpha2 >= 0.0) return (1.0 - r) / scale;
  if (alpha1 < 0.0 && alpha2 >= 0.0) return (1.0 + r) / scale;
  if (alpha1 >= 0.0) return (-1.0 - r) / scale;
  return (-1.0 + r) / scale;
}

namespace {

TermBoundCheck term_bound(FamilyIndex j, double alpha1, double alpha2,
                          const FamilyConfig& cfg, bool sample) {
  if (alpha1 == 0.0 && alpha2 == 0.0) throw ArgumentError("term has zero coefficients");
  const FamilyPair p = family_pair(j, cfg);
  const Domain& d = cfg.domain;
  TermBoundCheck r;
  const DiscreteSignedMeasure term = canonicalize(DiscreteSignedMeasure(
      d, {{p.x.point, alpha1 / p.separation + alpha2}, {p.y.point, -alpha1 / p.separation}}));
  r.lhs = kr_norm(term).value;
  r.rhs = (std::abs(alpha1) + std::abs(alpha2)) / (d.diameter() + 1.0);
  const double fx = testfn_eval(j, alpha1, alpha2, p.x.point, cfg);
  const double fy = testfn_eval(j, alpha1, alpha2, p.y.point, cfg);
  r.pairing = alpha1 * (fx - fy) / p.separation + alpha2 * fx;
  bool lip_ok = true;
  if (sample) {
    // About 1000 grid points plus x_j and y_j.
    const std::size_t n = d.dim();
    const auto per_axis = static_cast<std::size_t>(
        std::ceil(std::pow(1000.0, 1.0 / static_cast<double>(n)) - 1e-9));
    std::vector<Point> pts;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      std::vector<double> c(n);
      for (std::size_t i = 0; i < n; ++i) {
        c[i] = d.lo()[i] + d.side(i) * static_cast<double>(idx[i]) /
                               static_cast<double>(per_axis - 1);
      }
      pts.emplace_back(std::move(c));
      std::size_t i = n;
      while (i > 0 && idx[i - 1] == per_axis - 1) idx[--i] = 0;
      if (i == 0) break;
      ++idx[i - 1];
    }
    for (const Point& q : {p.x.point, p.y.point}) {
      if (std::find(pts.begin(), pts.end(), q) == pts.end()) pts.push_back(q);
    }
    std::vector<double> vals;
    for (const Point& q : pts) vals.push_back(testfn_eval(j, alpha1, alpha2, q, cfg));
    r.sampled_lip_norm = lip_norm(pts, vals);
    lip_ok = r.sampled_lip_norm <= 1.0 + 1e-9;
  }
  r.ok = r.lhs >= r.rhs - 1e-9 && std::abs(r.pairing - r.rhs) <= 1e-12 && lip_ok;
  return r;
}

template <class Dec>
BoundReport bounds(const DiscreteSignedMeasure& m, const Dec& dec, double tol, double floor,
                   bool extended) {
  const DiscreteSignedMeasure c = canonicalize(m);
  if (!(c == dec.target))
    throw ArgumentError("decomposition was produced for a different measure");
  auto norm = [&](const DiscreteSignedMeasure& x) {
    return extended ? kr_norm(x).value : kr0_norm(x).value;
  };
  BoundReport r;
  r.norm = norm(c);
  r.l1 = l1_of(dec.terms);
  r.residual = norm(c - reconstruct(dec));
  r.upper_ok = r.norm <= r.l1 + r.residual + tol;
  r.ratio = r.l1 > 0.0 ? r.norm / r.l1 : 0.0;
  r.per_term_lower_ok = true;
  for (const auto& t : dec.terms) {
    TermBoundCheck chk;
    if constexpr (std::is_same_v<Dec, AtomicDecomposition>) {
      chk = term_bound(t.pair, t.alpha1, t.alpha2, dec.family, false);
    } else {
      chk = term_bound(t.pair, t.alpha, 0.0, dec.family, false);
    }
    r.per_term_lower_ok = r.per_term_lower_ok && chk.ok;
  }
  r.floor = floor;
  r.floor_ok = dec.method != DecompositionMethod::L1Minimal || r.ratio >= floor - 1e-9;
  return r;
}

}  // namespace

TermBoundCheck verify_term_lower_bound(FamilyIndex j, double alpha1, double alpha2,
                                       const FamilyConfig& cfg) {
  return term_bound(j, alpha1, alpha2, cfg, true);
}

BoundReport verify_bounds(const DiscreteSignedMeasure& m, const AtomicDecomposition0& dec,
                          double tol, double floor) {
  return bounds(m, dec, tol, floor, false);
}

BoundReport verify_bounds(const DiscreteSignedMeasure& m, const AtomicDecomposition& dec,
                          double tol, double floor) {
  return bounds(m, dec, tol, floor, true);
}

bool mass_identity_check(const AtomicDecomposition& a, const AtomicDecomposition& b,
                         double tol) {
  if (!(a.target == b.target))
    throw ArgumentError("decompositions target different measures");
  return std::abs(a.alpha2_sum() - b.alpha2_sum()) <= 2.0 * tol + 1e-9;
}

json decomposition_to_json(const AtomicDecomposition0& dec) {
  json j = common_json(dec, "kr0");
  json terms = json::array();
  for (const DipoleTerm& t : dec.terms) terms.push_back(json::array({index_json(t.pair), t.alpha}));
  j["terms"] = std::move(terms);
  return j;
}

json decomposition_to_json(const AtomicDecomposition& dec) {
  json j = common_json(dec, "kr");
  json terms = json::array();
  for (const FullTerm& t : dec.terms) {
    terms.push_back(json::array({index_json(t.pair), t.alpha1, t.alpha2}));
  }
  j["terms"] = std::move(terms);
  return j;
}

ParsedDecomposition decomposition_from_json(const json& j) {
  const std::string where = "dec";
  if (!j.is_object()) throw ParseError("dec: expected an object");
  const auto variant_it = j.find("variant");
  if (variant_it == j.end() || !variant_it->is_string())
    throw ParseError("dec.variant: expected \"kr0\" or \"kr\"");
  const std::string variant = variant_it->get<std::string>();
  if (variant != "kr0" && variant != "kr")
    throw ParseError("dec.variant: expected \"kr0\" or \"kr\", got \"" + variant + "\"");

  DecompositionMethod method = DecompositionMethod::Greedy;
  if (const auto it = j.find("method"); it != j.end()) {
    if (*it == "l1") {
      method = DecompositionMethod::L1Minimal;
    } else if (*it != "greedy") {
      throw ParseError("dec.method: expected \"greedy\" or \"l1\"");
    }
  }
  int start_depth = 1;
  if (const auto it = j.find("start_depth"); it != j.end()) {
    if (!it->is_number_integer()) throw ParseError("dec.start_depth: expected an integer");
    start_depth = it->get<int>();
  }
  const double theta = j.contains("theta") ? real_field(j, "theta", where) : kDefaultTheta;

  const auto target_it = j.find("target");
  if (target_it == j.end()) throw ParseError("dec: missing field 'target'");
  DiscreteSignedMeasure target = [&] {
    try {
      return canonicalize(measure_from_json(*target_it));
    } catch (const Error& e) {
      throw ParseError(std::string("dec.target: ") + e.what());
    }
  }();
  std::optional<FamilyConfig> cfg;
  try {
    cfg.emplace(target.domain(), theta);
  } catch (const Error& e) {
    throw ParseError(std::string("dec.theta: ") + e.what());
  }

  const auto terms_it = j.find("terms");
  if (terms_it == j.end() || !terms_it->is_array())
    throw ParseError("dec.terms: expected an array");
  const std::size_t width = variant == "kr0" ? 2 : 3;

  ParsedDecomposition out;
  std::vector<DipoleTerm> dip;
  std::vector<FullTerm> full;
  for (std::size_t i = 0; i < terms_it->size(); ++i) {
    const json& t = (*terms_it)[i];
    const std::string at = "dec.terms[" + std::to_string(i) + "]";
    if (!t.is_array() || t.size() != width) {
      throw ParseError(at + (width == 2 ? ": expected [j, alpha]" : ": expected [j, alpha1, alpha2]"));
    }
    const FamilyIndex idx = index_from_json(t[0], at + "[0]");
    if (idx.value() == 0) throw ParseError(at + "[0]: pair index must be >= 1");
    for (std::size_t k = 1; k < width; ++k) {
      if (!t[k].is_number()) throw ParseError(at + "[" + std::to_string(k) + "]: expected a number");
    }
    if (width == 2) {
      dip.push_back({idx, t[1].get<double>()});
    } else {
      full.push_back({idx, t[1].get<double>(), t[2].get<double>()});
    }
  }
  const double norm = j.contains("norm") ? real_field(j, "norm", where) : 0.0;
  const double residual =
      j.contains("residual_norm") ? real_field(j, "residual_norm", where) : 0.0;
  if (width == 2) {
    AtomicDecomposition0 d{std::move(dip), 0.0, residual, norm, *cfg, method, start_depth,
                           std::move(target)};
    d.l1 = l1_of(d.terms);
    out.balanced = std::move(d);
  } else {
    AtomicDecomposition d{std::move(full), 0.0, residual, norm, *cfg, method, start_depth,
                          std::move(target)};
    d.l1 = l1_of(d.terms);
    out.full = std::move(d);
  }
  return out;
}

}  // namespace krnorm
