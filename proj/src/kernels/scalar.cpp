#include <cmath>
#include <limits>

#include "kernel_table.hpp"

namespace krnorm::kernels::detail {
namespace {

inline double dist_at(const double* coords, std::size_t stride, std::size_t dim,
                      std::size_t j, const double* z) {
  double s = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    const double d = coords[a * stride + j] - z[a];
    s += d * d;
  }
  return std::sqrt(s);
}

void distances(const double* coords, std::size_t stride, std::size_t dim,
               std::size_t n, const double* z, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = dist_at(coords, stride, dim, j, z);
}

double mcshane_min(const double* coords, std::size_t stride, std::size_t dim,
                   std::size_t n, const double* z, const double* values,
                   double lip) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const double c = values[j] + lip * dist_at(coords, stride, dim, j, z);
    if (c < best) best = c;
  }
  return best;
}

void lipschitz_row(const double* coords, std::size_t stride, std::size_t dim,
                   std::size_t begin, std::size_t end, const double* z,
                   double fz, const double* values, double* max_ratio,
                   bool* dup) {
  double m = *max_ratio;
  for (std::size_t j = begin; j < end; ++j) {
    const double d = dist_at(coords, stride, dim, j, z);
    if (d == 0.0) {
      *dup = true;
      continue;
    }
    const double r = std::fabs(fz - values[j]) / d;
    if (r > m) m = r;
  }
  *max_ratio = m;
}

void min_reduced_cost(const double* cost, double u, const double* v,
                      std::size_t n, double* best, std::size_t* index) {
  double b = cost[0] - u - v[0];
  std::size_t bi = 0;
  for (std::size_t j = 1; j < n; ++j) {
    const double r = cost[j] - u - v[j];
    if (r < b) {
      b = r;
      bi = j;
    }
  }
  *best = b;
  *index = bi;
}

}  // namespace

const KernelTable kScalarTable{distances, mcshane_min, lipschitz_row,
                               min_reduced_cost};

}  // namespace krnorm::kernels::detail
