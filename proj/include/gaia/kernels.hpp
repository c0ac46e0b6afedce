#pragma once

// Numeric hot loops. Every kernel exists twice: a plain serial reference
// used by the tests, and an OpenMP version used everywhere else. The
// parallel versions split work over output rows only, so each output
// element is accumulated in the same order whatever the thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "gaia/matrix.hpp"

namespace gaia::kernels {

#define GAIA_KERNEL_DECLS                                                                   \
  /* c = a * b */                                                                           \
  void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c);                                \
  /* c = a^T * b */                                                                         \
  void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c);                                \
  /* c = a * b^T */                                                                         \
  void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c);                                \
  /* out(i, j) = |a_i - b_j|^2 */                                                           \
  Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b);                               \
  /* Euclidean distance from each query row to its k-th nearest row of ref. With           \
     exclude_self, query and ref are the same set and index i skips itself. */              \
  std::vector<double> kth_neighbor_distances(const Matrix& query, const Matrix& ref,        \
                                             std::size_t k, bool exclude_self);             \
  /* log of an axis-aligned Gaussian kernel density at each sample row. */                  \
  std::vector<double> kde_log_density(const Matrix& samples, const Matrix& ref,             \
                                      std::span<const double> bandwidth);

namespace serial {
GAIA_KERNEL_DECLS
}

namespace parallel {
GAIA_KERNEL_DECLS
}

#undef GAIA_KERNEL_DECLS

using parallel::gemm_nn;
using parallel::gemm_nt;
using parallel::gemm_tn;
using parallel::kde_log_density;
using parallel::kth_neighbor_distances;
using parallel::pairwise_sq_dists;

// Caps OpenMP threads for the parallel kernels. Reads GAIA_LAB_THREADS when
// called with 0.
void set_thread_limit(int threads);
int thread_limit();

}  // namespace gaia::kernels
