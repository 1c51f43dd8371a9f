// Compiled with -mavx2 only; reached through the dispatcher after a CPUID
// check.

#include <immintrin.h>

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

// Four distances starting at j.
inline __m256d dist4(const double* coords, std::size_t stride, std::size_t dim,
                     std::size_t j, const double* z) {
  __m256d s = _mm256_setzero_pd();
  for (std::size_t a = 0; a < dim; ++a) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(coords + a * stride + j),
                                    _mm256_set1_pd(z[a]));
    s = _mm256_add_pd(s, _mm256_mul_pd(d, d));
  }
  return _mm256_sqrt_pd(s);
}

void distances(const double* coords, std::size_t stride, std::size_t dim,
               std::size_t n, const double* z, double* out) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) _mm256_storeu_pd(out + j, dist4(coords, stride, dim, j, z));
  for (; j < n; ++j) out[j] = dist_at(coords, stride, dim, j, z);
}

inline double hmin(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  double m = lanes[0];
  for (int l = 1; l < 4; ++l)
    if (lanes[l] < m) m = lanes[l];
  return m;
}

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  double m = lanes[0];
  for (int l = 1; l < 4; ++l)
    if (lanes[l] > m) m = lanes[l];
  return m;
}

double mcshane_min(const double* coords, std::size_t stride, std::size_t dim,
                   std::size_t n, const double* z, const double* values,
                   double lip) {
  const double inf = std::numeric_limits<double>::infinity();
  double best = inf;
  std::size_t j = 0;
  if (n >= 4) {
    __m256d vbest = _mm256_set1_pd(inf);
    const __m256d vlip = _mm256_set1_pd(lip);
    for (; j + 4 <= n; j += 4) {
      const __m256d c = _mm256_add_pd(_mm256_loadu_pd(values + j),
                                      _mm256_mul_pd(vlip, dist4(coords, stride, dim, j, z)));
      vbest = _mm256_min_pd(c, vbest);
    }
    best = hmin(vbest);
  }
  for (; j < n; ++j) {
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
  std::size_t j = begin;
  if (end - begin >= 4) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d vfz = _mm256_set1_pd(fz);
    __m256d vmax = _mm256_set1_pd(m);
    int zero_mask = 0;
    for (; j + 4 <= end; j += 4) {
      const __m256d d = dist4(coords, stride, dim, j, z);
      const __m256d is_zero = _mm256_cmp_pd(d, zero, _CMP_EQ_OQ);
      zero_mask |= _mm256_movemask_pd(is_zero);
      const __m256d diff = _mm256_andnot_pd(sign, _mm256_sub_pd(vfz, _mm256_loadu_pd(values + j)));
      const __m256d r = _mm256_blendv_pd(_mm256_div_pd(diff, d), zero, is_zero);
      vmax = _mm256_max_pd(r, vmax);
    }
    if (zero_mask) *dup = true;
    const double hm = hmax(vmax);
    if (hm > m) m = hm;
  }
  for (; j < end; ++j) {
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
  std::size_t j = 1;
  if (n >= 5) {
    // Lanes cover indices 0..4k-1; lane l keeps its first minimum.
    const __m256d vu = _mm256_set1_pd(u);
    __m256d vidx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    const __m256d step = _mm256_set1_pd(4.0);
    __m256d vbest = _mm256_sub_pd(_mm256_sub_pd(_mm256_loadu_pd(cost), vu), _mm256_loadu_pd(v));
    __m256d vbi = vidx;
    for (j = 4; j + 4 <= n; j += 4) {
      vidx = _mm256_add_pd(vidx, step);
      const __m256d r = _mm256_sub_pd(_mm256_sub_pd(_mm256_loadu_pd(cost + j), vu),
                                      _mm256_loadu_pd(v + j));
      const __m256d lt = _mm256_cmp_pd(r, vbest, _CMP_LT_OQ);
      vbest = _mm256_blendv_pd(vbest, r, lt);
      vbi = _mm256_blendv_pd(vbi, vidx, lt);
    }
    alignas(32) double lb[4], li[4];
    _mm256_store_pd(lb, vbest);
    _mm256_store_pd(li, vbi);
    b = lb[0];
    bi = static_cast<std::size_t>(li[0]);
    for (int l = 1; l < 4; ++l) {
      const auto idx = static_cast<std::size_t>(li[l]);
      if (lb[l] < b || (lb[l] == b && idx < bi)) {
        b = lb[l];
        bi = idx;
      }
    }
  }
  for (; j < n; ++j) {
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

const KernelTable kAvx2Table{distances, mcshane_min, lipschitz_row,
                             min_reduced_cost};

}  // namespace krnorm::kernels::detail
