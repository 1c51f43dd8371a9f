// AArch64 Advanced SIMD variant, two lanes of double.

#include <arm_neon.h>

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

inline float64x2_t dist2(const double* coords, std::size_t stride,
                         std::size_t dim, std::size_t j, const double* z) {
  float64x2_t s = vdupq_n_f64(0.0);
  for (std::size_t a = 0; a < dim; ++a) {
    const float64x2_t d = vsubq_f64(vld1q_f64(coords + a * stride + j), vdupq_n_f64(z[a]));
    s = vaddq_f64(s, vmulq_f64(d, d));
  }
  return vsqrtq_f64(s);
}

void distances(const double* coords, std::size_t stride, std::size_t dim,
               std::size_t n, const double* z, double* out) {
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) vst1q_f64(out + j, dist2(coords, stride, dim, j, z));
  for (; j < n; ++j) out[j] = dist_at(coords, stride, dim, j, z);
}

double mcshane_min(const double* coords, std::size_t stride, std::size_t dim,
                   std::size_t n, const double* z, const double* values,
                   double lip) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t j = 0;
  if (n >= 2) {
    float64x2_t vbest = vdupq_n_f64(best);
    const float64x2_t vlip = vdupq_n_f64(lip);
    for (; j + 2 <= n; j += 2) {
      const float64x2_t c = vaddq_f64(vld1q_f64(values + j),
                                      vmulq_f64(vlip, dist2(coords, stride, dim, j, z)));
      vbest = vminq_f64(vbest, c);
    }
    best = vminvq_f64(vbest);
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
  if (end - begin >= 2) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t vfz = vdupq_n_f64(fz);
    float64x2_t vmax = vdupq_n_f64(m);
    uint64x2_t any_zero = vdupq_n_u64(0);
    for (; j + 2 <= end; j += 2) {
      const float64x2_t d = dist2(coords, stride, dim, j, z);
      const uint64x2_t is_zero = vceqq_f64(d, zero);
      any_zero = vorrq_u64(any_zero, is_zero);
      const float64x2_t diff = vabsq_f64(vsubq_f64(vfz, vld1q_f64(values + j)));
      const float64x2_t r = vbslq_f64(is_zero, zero, vdivq_f64(diff, d));
      vmax = vmaxq_f64(vmax, r);
    }
    if (vgetq_lane_u64(any_zero, 0) | vgetq_lane_u64(any_zero, 1)) *dup = true;
    const double hm = vmaxvq_f64(vmax);
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
  if (n >= 3) {
    const float64x2_t vu = vdupq_n_f64(u);
    float64x2_t vidx = {0.0, 1.0};
    const float64x2_t step = vdupq_n_f64(2.0);
    float64x2_t vbest = vsubq_f64(vsubq_f64(vld1q_f64(cost), vu), vld1q_f64(v));
    float64x2_t vbi = vidx;
    for (j = 2; j + 2 <= n; j += 2) {
      vidx = vaddq_f64(vidx, step);
      const float64x2_t r = vsubq_f64(vsubq_f64(vld1q_f64(cost + j), vu), vld1q_f64(v + j));
      const uint64x2_t lt = vcltq_f64(r, vbest);
      vbest = vbslq_f64(lt, r, vbest);
      vbi = vbslq_f64(lt, vidx, vbi);
    }
    const double b0 = vgetq_lane_f64(vbest, 0), b1 = vgetq_lane_f64(vbest, 1);
    const auto i0 = static_cast<std::size_t>(vgetq_lane_f64(vbi, 0));
    const auto i1 = static_cast<std::size_t>(vgetq_lane_f64(vbi, 1));
    if (b1 < b0 || (b1 == b0 && i1 < i0)) {
      b = b1;
      bi = i1;
    } else {
      b = b0;
      bi = i0;
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

const KernelTable kNeonTable{distances, mcshane_min, lipschitz_row,
                             min_reduced_cost};

}  // namespace krnorm::kernels::detail
