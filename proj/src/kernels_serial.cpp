// Reference kernels. Straight loops, no blocking, no threads.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gaia/errors.hpp"
#include "gaia/kernels.hpp"

namespace gaia::kernels::serial {

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols() != b.rows()) throw DimensionError("gemm_nn: inner dims");
  c = Matrix(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) sum += a(i, p) * b(p, j);
      c(i, j) = sum;
    }
  }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.rows() != b.rows()) throw DimensionError("gemm_tn: inner dims");
  c = Matrix(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (std::size_t p = 0; p < a.rows(); ++p) sum += a(p, i) * b(p, j);
      c(i, j) = sum;
    }
  }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols() != b.cols()) throw DimensionError("gemm_nt: inner dims");
  c = Matrix(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double sum = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) sum += a(i, p) * b(j, p);
      c(i, j) = sum;
    }
  }
}

Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw DimensionError("pairwise_sq_dists: column mismatch");
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < a.cols(); ++d) {
        const double diff = a(i, d) - b(j, d);
        s += diff * diff;
      }
      out(i, j) = s;
    }
  }
  return out;
}

std::vector<double> kth_neighbor_distances(const Matrix& query, const Matrix& ref, std::size_t k,
                                           bool exclude_self) {
  if (query.cols() != ref.cols()) throw DimensionError("kth_neighbor_distances: column mismatch");
  const std::size_t available = ref.rows() - (exclude_self ? 1 : 0);
  if (k == 0 || k > available) throw DimensionError("kth_neighbor_distances: k out of range");
  const Matrix d2 = pairwise_sq_dists(query, ref);
  std::vector<double> out(query.rows());
  std::vector<double> row;
  for (std::size_t i = 0; i < query.rows(); ++i) {
    row.clear();
    for (std::size_t j = 0; j < ref.rows(); ++j) {
      if (exclude_self && i == j) continue;
      row.push_back(d2(i, j));
    }
    std::sort(row.begin(), row.end());
    out[i] = std::sqrt(row[k - 1]);
  }
  return out;
}

std::vector<double> kde_log_density(const Matrix& samples, const Matrix& ref,
                                    std::span<const double> bandwidth) {
  if (samples.cols() != ref.cols() || bandwidth.size() != ref.cols()) {
    throw DimensionError("kde_log_density: dimension mismatch");
  }
  double log_norm = std::log(static_cast<double>(ref.rows()));
  for (double h : bandwidth) log_norm += std::log(h) + 0.5 * std::log(2.0 * std::numbers::pi);

  std::vector<double> out(samples.rows());
  std::vector<double> exponents(ref.rows());
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    for (std::size_t j = 0; j < ref.rows(); ++j) {
      double q = 0.0;
      for (std::size_t d = 0; d < ref.cols(); ++d) {
        const double u = (samples(i, d) - ref(j, d)) / bandwidth[d];
        q += u * u;
      }
      exponents[j] = -0.5 * q;
    }
    const double mx = *std::max_element(exponents.begin(), exponents.end());
    double sum = 0.0;
    for (double e : exponents) sum += std::exp(e - mx);
    out[i] = mx + std::log(sum) - log_norm;
  }
  return out;
}

}  // namespace gaia::kernels::serial
