#pragma once

// Function table implemented once per instruction set. Coordinates are
// axis-major with `stride` doubles between axes.

#include <cstddef>

namespace krnorm::kernels::detail {

struct KernelTable {
  // out[j] = |z - p_j| for j in [0, n).
  void (*distances)(const double* coords, std::size_t stride, std::size_t dim,
                    std::size_t n, const double* z, double* out);
  // min_j (values[j] + lip * |z - p_j|), +inf when n == 0.
  double (*mcshane_min)(const double* coords, std::size_t stride,
                        std::size_t dim, std::size_t n, const double* z,
                        const double* values, double lip);
  // Folds max_j |fz - values[j]| / |z - p_j| over j in [begin, end) into
  // *max_ratio; sets *dup when a distance is zero.
  void (*lipschitz_row)(const double* coords, std::size_t stride,
                        std::size_t dim, std::size_t begin, std::size_t end,
                        const double* z, double fz, const double* values,
                        double* max_ratio, bool* dup);
  // First j minimizing cost[j] - u - v[j]; n > 0.
  void (*min_reduced_cost)(const double* cost, double u, const double* v,
                           std::size_t n, double* best, std::size_t* index);
};

extern const KernelTable kScalarTable;
#if defined(KRNORM_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(KRNORM_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif

}  // namespace krnorm::kernels::detail
