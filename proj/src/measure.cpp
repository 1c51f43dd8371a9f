#include "krnorm/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "krnorm/errors.hpp"

namespace krnorm {

double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Domain::Domain(std::vector<double> lo, std::vector<double> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.empty()) throw DomainError("domain dimension must be positive");
  if (lo_.size() != hi_.size())
    throw DomainError("domain lo/hi have different lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]) || !(lo_[i] < hi_[i])) {
      std::ostringstream os;
      os << "domain axis " << i << " needs finite lo < hi";
      throw DomainError(os.str());
    }
    const double d = hi_[i] - lo_[i];
    s += d * d;
  }
  diameter_ = std::sqrt(s);
}

Domain Domain::unit_box(std::size_t dim) {
  return Domain(std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0));
}

double Domain::max_side() const {
  double m = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) m = std::max(m, side(i));
  return m;
}

bool Domain::contains(const Point& p) const {
  if (p.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!(lo_[i] <= p[i] && p[i] <= hi_[i])) return false;
  }
  return true;
}

void Domain::require(const Point& p) const {
  if (p.dim() != dim()) {
    std::ostringstream os;
    os << "point has dimension " << p.dim() << ", domain has " << dim();
    throw DomainError(os.str());
  }
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!(lo_[i] <= p[i] && p[i] <= hi_[i])) {
      std::ostringstream os;
      os.precision(17);
      os << "point coordinate " << i << " = " << p[i] << " outside [" << lo_[i]
         << ", " << hi_[i] << "]";
      throw DomainError(os.str());
    }
  }
}

DiscreteSignedMeasure::DiscreteSignedMeasure(Domain domain,
                                             std::vector<Atom> atoms)
    : domain_(std::move(domain)), atoms_(std::move(atoms)) {
  for (const Atom& a : atoms_) {
    domain_.require(a.point);
    if (!std::isfinite(a.weight)) throw ArgumentError("non-finite atom weight");
  }
}

DiscreteSignedMeasure canonicalize(const DiscreteSignedMeasure& m,
                                   double drop_threshold) {
  std::vector<Atom> atoms(m.atoms().begin(), m.atoms().end());
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
    return std::is_lt(a.point <=> b.point);
  });
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (Atom& a : atoms) {
    if (!merged.empty() && merged.back().point == a.point) {
      merged.back().weight += a.weight;
    } else {
      merged.push_back(std::move(a));
    }
  }
  std::erase_if(merged, [drop_threshold](const Atom& a) {
    return a.weight == 0.0 || std::abs(a.weight) <= drop_threshold;
  });
  return DiscreteSignedMeasure(m.domain(), std::move(merged));
}

bool is_canonical(const DiscreteSignedMeasure& m) {
  const auto atoms = m.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].weight == 0.0) return false;
    if (i > 0 && !std::is_lt(atoms[i - 1].point <=> atoms[i].point)) return false;
  }
  return true;
}

double total_mass(const DiscreteSignedMeasure& m) {
  double s = 0.0;
  for (const Atom& a : m.atoms()) s += a.weight;
  return s;
}

double total_variation(const DiscreteSignedMeasure& m) {
  double s = 0.0;
  for (const Atom& a : m.atoms()) s += std::abs(a.weight);
  return s;
}

HahnJordanPair hahn_jordan(const DiscreteSignedMeasure& m) {
  const DiscreteSignedMeasure c = canonicalize(m);
  std::vector<Atom> pos, neg;
  for (const Atom& a : c.atoms()) {
    if (a.weight > 0.0) {
      pos.push_back(a);
    } else {
      neg.push_back({a.point, -a.weight});
    }
  }
  return {DiscreteSignedMeasure(c.domain(), std::move(pos)),
          DiscreteSignedMeasure(c.domain(), std::move(neg))};
}

bool is_balanced(const DiscreteSignedMeasure& m, double tol) {
  return std::abs(total_mass(m)) <= tol;
}

DiscreteSignedMeasure dirac(const Domain& domain, const Point& x) {
  return DiscreteSignedMeasure(domain, {{x, 1.0}});
}

DiscreteSignedMeasure dipole(const Domain& domain, const Point& x,
                             const Point& y, double a) {
  if (x == y) throw DegenerateDipoleError("dipole endpoints coincide");
  return canonicalize(DiscreteSignedMeasure(domain, {{x, a}, {y, -a}}));
}

namespace {

void require_same_domain(const DiscreteSignedMeasure& a,
                         const DiscreteSignedMeasure& b) {
  if (!(a.domain() == b.domain()))
    throw DomainError("measures live on different domains");
}

}  // namespace

DiscreteSignedMeasure operator+(const DiscreteSignedMeasure& a,
                                const DiscreteSignedMeasure& b) {
  require_same_domain(a, b);
  std::vector<Atom> atoms(a.atoms().begin(), a.atoms().end());
  atoms.insert(atoms.end(), b.atoms().begin(), b.atoms().end());
  return canonicalize(DiscreteSignedMeasure(a.domain(), std::move(atoms)));
}

DiscreteSignedMeasure operator-(const DiscreteSignedMeasure& a,
                                const DiscreteSignedMeasure& b) {
  return a + (-1.0) * b;
}

DiscreteSignedMeasure operator*(double s, const DiscreteSignedMeasure& m) {
  std::vector<Atom> atoms;
  atoms.reserve(m.size());
  for (const Atom& a : m.atoms()) atoms.push_back({a.point, s * a.weight});
  return canonicalize(DiscreteSignedMeasure(m.domain(), std::move(atoms)));
}

}  // namespace krnorm
