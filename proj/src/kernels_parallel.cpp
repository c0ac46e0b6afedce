#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>

#include "gaia/errors.hpp"
#include "gaia/kernels.hpp"

namespace gaia::kernels {

namespace {

std::atomic<int> g_threads{0};

int env_threads() {
  if (const char* env = std::getenv("GAIA_LAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

// Minimum multiply-add count for a parallel region.
constexpr std::size_t kParallelWork = 1 << 15;

}  // namespace

void set_thread_limit(int threads) { g_threads = threads > 0 ? threads : env_threads(); }

int thread_limit() {
  int n = g_threads.load();
  if (n == 0) {
    n = env_threads();
    g_threads = n;
  }
  return n;
}

namespace parallel {

namespace {

constexpr std::size_t kRowBlock = 6;
constexpr std::size_t kColBlock = 32;

// Register tile: rows [i0, i0+R) x cols [j0, j0+C) accumulated over all p.
template <std::size_t R, std::size_t C>
inline void gemm_tile(const double* a, std::size_t lda, const double* b, std::size_t k,
                      std::size_t n, double* c, std::size_t i0, std::size_t j0) {
  double acc[R][C] = {};
  for (std::size_t p = 0; p < k; ++p) {
    const double* brow = b + p * n + j0;
    for (std::size_t r = 0; r < R; ++r) {
      const double av = a[(i0 + r) * lda + p];
#pragma omp simd
      for (std::size_t j = 0; j < C; ++j) acc[r][j] += av * brow[j];
    }
  }
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t j = 0; j < C; ++j) c[(i0 + r) * n + j0 + j] = acc[r][j];
  }
}

// Fallback for ragged edges; same accumulation order as the tiles.
inline void gemm_edge(const double* a, std::size_t lda, const double* b, std::size_t k,
                      std::size_t n, double* c, std::size_t i0, std::size_t i1, std::size_t j0,
                      std::size_t j1) {
  for (std::size_t i = i0; i < i1; ++i) {
    double* crow = c + i * n;
    for (std::size_t j = j0; j < j1; ++j) crow[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * lda + p];
      const double* brow = b + p * n;
      for (std::size_t j = j0; j < j1; ++j) crow[j] += av * brow[j];
    }
  }
}

// c(i, :) = sum_p a(i, p) * b(p, :). Row blocks are split across threads;
// each element sums over p in ascending order regardless of blocking.
void gemm_rows(const double* a, std::size_t lda, const double* b, std::size_t m, std::size_t k,
               std::size_t n, double* c) {
  const bool go_parallel = m * k * n >= kParallelWork;
  const std::size_t row_blocks = (m + kRowBlock - 1) / kRowBlock;
  const std::size_t n_full = n - n % kColBlock;
#pragma omp parallel for schedule(static) num_threads(thread_limit()) if (go_parallel)
  for (std::ptrdiff_t bb = 0; bb < static_cast<std::ptrdiff_t>(row_blocks); ++bb) {
    const std::size_t i0 = static_cast<std::size_t>(bb) * kRowBlock;
    const std::size_t i1 = std::min(m, i0 + kRowBlock);
    if (i1 - i0 == kRowBlock) {
      for (std::size_t j0 = 0; j0 < n_full; j0 += kColBlock) {
        gemm_tile<kRowBlock, kColBlock>(a, lda, b, k, n, c, i0, j0);
      }
    } else if (n_full > 0) {
      gemm_edge(a, lda, b, k, n, c, i0, i1, 0, n_full);
    }
    if (n_full < n) gemm_edge(a, lda, b, k, n, c, i0, i1, n_full, n);
  }
}

}  // namespace

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols() != b.rows()) throw DimensionError("gemm_nn: inner dims");
  if (c.rows() != a.rows() || c.cols() != b.cols()) c = Matrix(a.rows(), b.cols());
  gemm_rows(a.data(), a.cols(), b.data(), a.rows(), a.cols(), b.cols(), c.data());
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.rows() != b.rows()) throw DimensionError("gemm_tn: inner dims");
  const std::size_t m = a.cols(), k = a.rows(), n = b.cols();
  thread_local std::vector<double> at;
  at.resize(m * k);
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t i = 0; i < m; ++i) at[i * k + p] = a(p, i);
  }
  if (c.rows() != m || c.cols() != n) c = Matrix(m, n);
  gemm_rows(at.data(), k, b.data(), m, k, n, c.data());
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols() != b.cols()) throw DimensionError("gemm_nt: inner dims");
  // Transpose b once so the inner loop streams contiguous rows.
  const std::size_t k = b.cols(), n = b.rows();
  thread_local std::vector<double> bt;
  bt.resize(k * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t p = 0; p < k; ++p) bt[p * n + j] = b(j, p);
  }
  if (c.rows() != a.rows() || c.cols() != n) c = Matrix(a.rows(), n);
  gemm_rows(a.data(), a.cols(), bt.data(), a.rows(), k, n, c.data());
}

Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("pairwise_sq_dists: column mismatch");
  Matrix out(a.rows(), b.rows());
  const std::size_t dim = a.cols();
  const bool go_parallel = a.rows() * b.rows() * dim >= kParallelWork;
#pragma omp parallel for schedule(static) num_threads(thread_limit()) if (go_parallel)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(a.rows()); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto ai = a.row(i);
    auto orow = out.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto bj = b.row(j);
      double s = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = ai[d] - bj[d];
        s += diff * diff;
      }
      orow[j] = s;
    }
  }
  return out;
}

std::vector<double> kth_neighbor_distances(const Matrix& query, const Matrix& ref, std::size_t k,
                                           bool exclude_self) {
  if (query.cols() != ref.cols()) throw DimensionError("kth_neighbor_distances: column mismatch");
  const std::size_t available = ref.rows() - (exclude_self ? 1 : 0);
  if (k == 0 || k > available) throw DimensionError("kth_neighbor_distances: k out of range");
  const std::size_t dim = query.cols();
  std::vector<double> out(query.rows());
  const bool go_parallel = query.rows() * ref.rows() * dim >= kParallelWork;
#pragma omp parallel num_threads(thread_limit()) if (go_parallel)
  {
    // best[0..k) holds the k smallest squared distances seen so far, ascending.
    std::vector<double> best(k);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(query.rows()); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
      const auto qi = query.row(i);
      for (std::size_t j = 0; j < ref.rows(); ++j) {
        if (exclude_self && i == j) continue;
        const auto rj = ref.row(j);
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          const double diff = qi[d] - rj[d];
          s += diff * diff;
        }
        if (s >= best[k - 1]) continue;
        std::size_t pos = k - 1;
        while (pos > 0 && best[pos - 1] > s) {
          best[pos] = best[pos - 1];
          --pos;
        }
        best[pos] = s;
      }
      out[i] = std::sqrt(best[k - 1]);
    }
  }
  return out;
}

std::vector<double> kde_log_density(const Matrix& samples, const Matrix& ref,
                                    std::span<const double> bandwidth) {
  if (samples.cols() != ref.cols() || bandwidth.size() != ref.cols()) {
    throw DimensionError("kde_log_density: dimension mismatch");
  }
  const std::size_t dim = ref.cols();
  double log_norm = std::log(static_cast<double>(ref.rows()));
  std::vector<double> inv_h(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    log_norm += std::log(bandwidth[d]) + 0.5 * std::log(2.0 * std::numbers::pi);
    inv_h[d] = 1.0 / bandwidth[d];
  }
  // Pre-scale the reference set so the inner loop is a plain distance.
  Matrix scaled_ref = ref;
  for (std::size_t j = 0; j < ref.rows(); ++j) {
    for (std::size_t d = 0; d < dim; ++d) scaled_ref(j, d) *= inv_h[d];
  }

  std::vector<double> out(samples.rows());
  const bool go_parallel = samples.rows() * ref.rows() * dim >= kParallelWork;
#pragma omp parallel num_threads(thread_limit()) if (go_parallel)
  {
    std::vector<double> exponents(ref.rows());
    std::vector<double> s(dim);
#pragma omp for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(samples.rows()); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      for (std::size_t d = 0; d < dim; ++d) s[d] = samples(i, d) * inv_h[d];
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < ref.rows(); ++j) {
        const auto rj = scaled_ref.row(j);
        double q = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          const double u = s[d] - rj[d];
          q += u * u;
        }
        exponents[j] = -0.5 * q;
        mx = std::max(mx, exponents[j]);
      }
      double sum = 0.0;
      for (double e : exponents) sum += std::exp(e - mx);
      out[i] = mx + std::log(sum) - log_norm;
    }
  }
  return out;
}

}  // namespace parallel
}  // namespace gaia::kernels
