#pragma once

// Data-parallel inner loops shared by the solvers.
//
// Every kernel has a scalar reference implementation and optional AVX2 /
// NEON variants. Variants vectorize across points (never across axes), so
// each lane performs exactly the scalar operation sequence and results are
// bitwise identical to the reference. The active backend is chosen once at
// startup from the CPU features; KRNORM_SIMD=scalar|avx2|neon overrides it.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "krnorm/measure.hpp"

namespace krnorm {

/// Structure-of-arrays point storage: axis-major, coords[axis * size + i].
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}
  PointSet(std::size_t dim, std::span<const Point> points);

  void push_back(const Point& p);
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return size_; }
  /// Contiguous coordinates of one axis.
  std::span<const double> axis(std::size_t a) const {
    return {coords_.data() + a * size_, size_};
  }
  Point point(std::size_t i) const;

 private:
  std::size_t dim_ = 0;
  std::size_t size_ = 0;
  std::vector<double> coords_;
};

namespace kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);
bool backend_supported(Backend b);
/// All backends usable on this machine, Scalar first.
std::vector<Backend> supported_backends();
Backend active_backend();
/// Throws ArgumentError if the backend is not supported here.
void set_backend(Backend b);

struct ArgMin {
  double value;
  std::size_t index;
};

/// out[i * b.size() + j] = |a_i - b_j|.
void distance_matrix(const PointSet& a, const PointSet& b, std::span<double> out);

/// out[i] = |z - p_i|.
void distances_from(std::span<const double> z, const PointSet& pts,
                    std::span<double> out);

/// min_i (values[i] + lip * |z - p_i|); +inf for an empty set.
double mcshane_min(std::span<const double> z, const PointSet& pts,
                   std::span<const double> values, double lip);

struct LipschitzScan {
  double ratio;         // max_{i<j} |f_i - f_j| / |p_i - p_j|
  bool has_duplicate;   // some pair at distance 0
};
LipschitzScan max_lipschitz_ratio(const PointSet& pts,
                                  std::span<const double> values);

/// First index minimizing cost[j] - u - v[j].
ArgMin min_reduced_cost(std::span<const double> cost, double u,
                        std::span<const double> v);

}  // namespace kernels
}  // namespace krnorm
