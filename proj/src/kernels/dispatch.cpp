#include <atomic>
#include <cstdlib>
#include <string>

#include "kernel_table.hpp"
#include "krnorm/errors.hpp"
#include "krnorm/kernels.hpp"

namespace krnorm {

PointSet::PointSet(std::size_t dim, std::span<const Point> points)
    : dim_(dim), size_(points.size()), coords_(dim * points.size()) {
  for (std::size_t i = 0; i < size_; ++i) {
    if (points[i].dim() != dim_) throw DomainError("PointSet: dimension mismatch");
    for (std::size_t a = 0; a < dim_; ++a) coords_[a * size_ + i] = points[i][a];
  }
}

void PointSet::push_back(const Point& p) {
  if (p.dim() != dim_) throw DomainError("PointSet: dimension mismatch");
  std::vector<double> next(dim_ * (size_ + 1));
  for (std::size_t a = 0; a < dim_; ++a) {
    for (std::size_t i = 0; i < size_; ++i) next[a * (size_ + 1) + i] = coords_[a * size_ + i];
    next[a * (size_ + 1) + size_] = p[a];
  }
  coords_ = std::move(next);
  ++size_;
}

Point PointSet::point(std::size_t i) const {
  std::vector<double> c(dim_);
  for (std::size_t a = 0; a < dim_; ++a) c[a] = coords_[a * size_ + i];
  return Point(std::move(c));
}

namespace kernels {
namespace {

using detail::KernelTable;

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &detail::kScalarTable;
    case Backend::Avx2:
#if defined(KRNORM_HAVE_AVX2)
      if (__builtin_cpu_supports("avx2")) return &detail::kAvx2Table;
#endif
      return nullptr;
    case Backend::Neon:
#if defined(KRNORM_HAVE_NEON)
      return &detail::kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Backend initial_backend() {
  if (const char* env = std::getenv("KRNORM_SIMD")) {
    const std::string s(env);
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
      if (s == backend_name(b) && table_for(b)) return b;
    }
  }
  for (Backend b : {Backend::Avx2, Backend::Neon}) {
    if (table_for(b)) return b;
  }
  return Backend::Scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{initial_backend()};
  return slot;
}

const KernelTable& active() { return *table_for(backend_slot().load()); }

const double* axis_base(const PointSet& s) {
  return s.size() == 0 ? nullptr : s.axis(0).data();
}

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

bool backend_supported(Backend b) { return table_for(b) != nullptr; }

std::vector<Backend> supported_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
    if (backend_supported(b)) out.push_back(b);
  }
  return out;
}

Backend active_backend() { return backend_slot().load(); }

void set_backend(Backend b) {
  if (!backend_supported(b))
    throw ArgumentError("kernel backend not supported: " + std::string(backend_name(b)));
  backend_slot().store(b);
}

void distance_matrix(const PointSet& a, const PointSet& b, std::span<double> out) {
  if (a.dim() != b.dim()) throw DomainError("distance_matrix: dimension mismatch");
  if (out.size() != a.size() * b.size())
    throw ArgumentError("distance_matrix: output size mismatch");
  const KernelTable& k = active();
  std::vector<double> z(a.dim());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t d = 0; d < a.dim(); ++d) z[d] = a.axis(d)[i];
    k.distances(axis_base(b), b.size(), b.dim(), b.size(), z.data(),
                out.data() + i * b.size());
  }
}

void distances_from(std::span<const double> z, const PointSet& pts,
                    std::span<double> out) {
  if (z.size() != pts.dim()) throw DomainError("distances_from: dimension mismatch");
  if (out.size() != pts.size()) throw ArgumentError("distances_from: output size mismatch");
  active().distances(axis_base(pts), pts.size(), pts.dim(), pts.size(), z.data(),
                     out.data());
}

double mcshane_min(std::span<const double> z, const PointSet& pts,
                   std::span<const double> values, double lip) {
  if (z.size() != pts.dim()) throw DomainError("mcshane_min: dimension mismatch");
  if (values.size() != pts.size()) throw ArgumentError("mcshane_min: value count mismatch");
  return active().mcshane_min(axis_base(pts), pts.size(), pts.dim(), pts.size(),
                              z.data(), values.data(), lip);
}

LipschitzScan max_lipschitz_ratio(const PointSet& pts,
                                  std::span<const double> values) {
  if (values.size() != pts.size())
    throw ArgumentError("max_lipschitz_ratio: value count mismatch");
  const KernelTable& k = active();
  LipschitzScan scan{0.0, false};
  std::vector<double> z(pts.dim());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    for (std::size_t d = 0; d < pts.dim(); ++d) z[d] = pts.axis(d)[i];
    k.lipschitz_row(axis_base(pts), pts.size(), pts.dim(), i + 1, pts.size(),
                    z.data(), values[i], values.data(), &scan.ratio,
                    &scan.has_duplicate);
  }
  return scan;
}

ArgMin min_reduced_cost(std::span<const double> cost, double u,
                        std::span<const double> v) {
  if (cost.empty() || cost.size() != v.size())
    throw ArgumentError("min_reduced_cost: size mismatch");
  ArgMin r{};
  active().min_reduced_cost(cost.data(), u, v.data(), cost.size(), &r.value,
                            &r.index);
  return r;
}

}  // namespace kernels
}  // namespace krnorm
