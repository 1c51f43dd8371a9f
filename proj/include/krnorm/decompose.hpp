#pragma once

// Atomic decompositions over the pair family.
//
// Balanced series: m = sum_j alpha_j (delta_{x_j} - delta_{y_j}) / |x_j - y_j|.
// Full series:     m = sum_j alpha1_j (delta_{x_j} - delta_{y_j}) / |x_j - y_j|
//                        + alpha2_j delta_{x_j}.
// Terms are keyed by pair index j and kept sorted by j.
//
// The greedy method chains each edge (u, v, c) of an optimal plan through
// family points: a main dipole x -> y with x in D1 near u and y in D2 near v,
// then alternating D1/D2 snaps of u and v at increasing depth until the
// leftover c |p - a| of each chain drops below a per-edge budget. The
// residual is certified by a fresh norm solve; if it exceeds tol the budget
// is halved and the construction repeated.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "krnorm/family.hpp"
#include "krnorm/measure.hpp"

namespace krnorm {

enum class DecompositionMethod { Greedy, L1Minimal };
const char* method_name(DecompositionMethod m);

struct DecomposeOptions {
  /// First depth tried when snapping support points onto the families.
  int start_depth = 1;
};

struct DipoleTerm {
  FamilyIndex pair;
  double alpha = 0.0;
};

struct FullTerm {
  FamilyIndex pair;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

/// Decomposition of a balanced measure (KR0 series).
struct AtomicDecomposition0 {
  std::vector<DipoleTerm> terms;
  double l1 = 0.0;
  double residual_norm = 0.0;  // ||target - reconstruction||_KR0
  double norm = 0.0;           // ||target||_KR0
  FamilyConfig family;
  DecompositionMethod method = DecompositionMethod::Greedy;
  int start_depth = 1;
  DiscreteSignedMeasure target;  // canonical

  /// norm / l1, the empirical stand-in for the lower-bound constant; 0 when
  /// l1 is 0.
  double ratio() const { return l1 > 0.0 ? norm / l1 : 0.0; }
};

/// Decomposition of a general measure (KR series).
struct AtomicDecomposition {
  std::vector<FullTerm> terms;
  double l1 = 0.0;
  double residual_norm = 0.0;  // ||target - reconstruction||_KR
  double norm = 0.0;           // ||target||_KR
  FamilyConfig family;
  DecompositionMethod method = DecompositionMethod::Greedy;
  int start_depth = 1;
  DiscreteSignedMeasure target;

  double ratio() const { return l1 > 0.0 ? norm / l1 : 0.0; }
  double alpha2_sum() const;
};

/// Throws ArgumentError for tol <= 0, BalanceError for unbalanced input,
/// DomainError when m and cfg live on different boxes.
AtomicDecomposition0 decompose_balanced(const DiscreteSignedMeasure& m, double tol,
                                        const FamilyConfig& cfg,
                                        const DecomposeOptions& opt = {});

/// Delta terms alpha2 = w at the D1 point nearest each atom, then the
/// balanced discrepancy sum w (delta_p - delta_x) as dipole terms.
AtomicDecomposition decompose_full(const DiscreteSignedMeasure& m, double tol,
                                   const FamilyConfig& cfg,
                                   const DecomposeOptions& opt = {});

/// Minimal sum |alpha| over pairs j <= n_pairs with exact atomwise equality,
/// as a linear program. Throws InfeasibleError naming the support points
/// that are not pair points, or when no exact representation exists.
AtomicDecomposition0 decompose_l1_minimal_balanced(const DiscreteSignedMeasure& m,
                                                   std::uint64_t n_pairs,
                                                   const FamilyConfig& cfg);
AtomicDecomposition decompose_l1_minimal_full(const DiscreteSignedMeasure& m,
                                              std::uint64_t n_pairs,
                                              const FamilyConfig& cfg);

/// Canonical partial sum over the first `prefix` terms (all by default).
/// Throws ArgumentError when prefix exceeds the number of terms.
DiscreteSignedMeasure reconstruct(const AtomicDecomposition0& dec,
                                  std::optional<std::size_t> prefix = std::nullopt);
DiscreteSignedMeasure reconstruct(const AtomicDecomposition& dec,
                                  std::optional<std::size_t> prefix = std::nullopt);

/// f_j(z; alpha1, alpha2): (+-1 -+ |x_j - z|) / (d + 1) with d the box
/// diameter and the signs chosen from the signs of the coefficients.
double testfn_eval(FamilyIndex j, double alpha1, double alpha2, const Point& z,
                   const FamilyConfig& cfg);

struct TermBoundCheck {
  double lhs = 0.0;      // ||alpha1 mu_dipole + alpha2 delta_x||_KR
  double rhs = 0.0;      // (|alpha1| + |alpha2|) / (d + 1)
  double pairing = 0.0;  // <f_j, term>
  double sampled_lip_norm = 0.0;
  bool ok = false;
};

/// Throws ArgumentError when both coefficients vanish.
TermBoundCheck verify_term_lower_bound(FamilyIndex j, double alpha1, double alpha2,
                                       const FamilyConfig& cfg);

struct BoundReport {
  double norm = 0.0;
  double l1 = 0.0;
  double residual = 0.0;  // recomputed, not taken from the decomposition
  bool upper_ok = false;
  double ratio = 0.0;
  bool per_term_lower_ok = false;
  double floor = 0.0;
  /// ratio >= floor; only asserted for l1-minimal decompositions.
  bool floor_ok = true;
};

/// Throws ArgumentError when dec was produced for a different measure.
BoundReport verify_bounds(const DiscreteSignedMeasure& m, const AtomicDecomposition0& dec,
                          double tol, double floor = 0.0);
BoundReport verify_bounds(const DiscreteSignedMeasure& m, const AtomicDecomposition& dec,
                          double tol, double floor = 0.0);

/// |sum alpha2 - sum beta2| <= 2 tol + 1e-9. Throws ArgumentError when the
/// targets differ.
bool mass_identity_check(const AtomicDecomposition& a, const AtomicDecomposition& b,
                         double tol);

nlohmann::json decomposition_to_json(const AtomicDecomposition0& dec);
nlohmann::json decomposition_to_json(const AtomicDecomposition& dec);

/// Either variant, as recorded in the "variant" field ("kr0" or "kr").
struct ParsedDecomposition {
  std::optional<AtomicDecomposition0> balanced;
  std::optional<AtomicDecomposition> full;
};
/// Throws ParseError naming the offending field.
ParsedDecomposition decomposition_from_json(const nlohmann::json& j);

}  // namespace krnorm
