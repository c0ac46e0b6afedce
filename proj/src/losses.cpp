#include "gaia/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gaia/errors.hpp"
#include "gaia/kernels.hpp"

namespace gaia {

double pixel_loss(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "pixel_loss");
  if (a.empty()) throw DimensionError("pixel_loss: empty input");
  double sum = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) sum += std::abs(av[i] - bv[i]);
  return sum / static_cast<double>(av.size());
}

Matrix pixel_loss_grad(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "pixel_loss_grad");
  Matrix g(a.rows(), a.cols());
  const double inv_n = 1.0 / static_cast<double>(a.size());
  const auto av = a.values();
  const auto bv = b.values();
  auto gv = g.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    gv[i] = d > 0.0 ? inv_n : (d < 0.0 ? -inv_n : 0.0);
  }
  return g;
}

namespace {

// log2(1 + d_ij^2 / mean d^2) for every ordered pair, plus the mean itself.
struct NormalizedLogDists {
  Matrix sq;      // d_ij^2
  Matrix logd;    // log2(1 + d_ij^2 / mean)
  double mean = 0.0;
};

NormalizedLogDists normalized_log_dists(const Matrix& m, const char* which) {
  NormalizedLogDists out;
  out.sq = kernels::pairwise_sq_dists(m, m);
  double sum = 0.0;
  for (double v : out.sq.values()) sum += v;
  out.mean = sum / static_cast<double>(out.sq.size());
  if (!(out.mean > 0.0)) {
    throw NumericError(std::string("distance_loss: all rows of ") + which +
                       " are identical, mean pairwise distance is zero");
  }
  out.logd = Matrix(out.sq.rows(), out.sq.cols());
  for (std::size_t i = 0; i < out.sq.size(); ++i) {
    out.logd.values()[i] = std::log2(1.0 + out.sq.values()[i] / out.mean);
  }
  return out;
}

void check_distance_args(const Matrix& x, const Matrix& z) {
  if (x.rows() != z.rows()) throw DimensionError("distance_loss: row counts differ");
  if (x.rows() < 2) throw DimensionError("distance_loss: need at least 2 rows");
}

}  // namespace

double distance_loss(const Matrix& x, const Matrix& z) {
  check_distance_args(x, z);
  const auto dx = normalized_log_dists(x, "x");
  const auto dz = normalized_log_dists(z, "z");
  double sum = 0.0;
  for (std::size_t i = 0; i < dx.logd.size(); ++i) {
    const double diff = dx.logd.values()[i] - dz.logd.values()[i];
    sum += diff * diff;
  }
  return sum / static_cast<double>(x.rows());
}

Matrix distance_loss_grad(const Matrix& x, const Matrix& z) {
  check_distance_args(x, z);
  const auto dx = normalized_log_dists(x, "x");
  const auto dz = normalized_log_dists(z, "z");
  const std::size_t b = x.rows();
  const double inv_b = 1.0 / static_cast<double>(b);
  const double pairs = static_cast<double>(b * b);

  // g_ij = dL/du_ij where u_ij = dz_ij^2 / mean.
  Matrix g(b, b);
  double weighted = 0.0;  // sum_ij g_ij * u_ij
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double u = dz.sq.values()[k] / dz.mean;
    const double diff = dz.logd.values()[k] - dx.logd.values()[k];
    g.values()[k] = 2.0 * inv_b * diff / ((1.0 + u) * std::numbers::ln2);
    weighted += g.values()[k] * u;
  }
  // dL/d(d_ij^2) through both the pair term and the shared mean.
  const double mean_term = weighted / pairs;
  Matrix grad(b, z.cols());
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      if (i == j) continue;
      const double dd = (g(i, j) + g(j, i) - 2.0 * mean_term) / dz.mean;
      for (std::size_t c = 0; c < z.cols(); ++c) grad(i, c) += 2.0 * dd * (z(i, c) - z(j, c));
    }
  }
  return grad;
}

double balance_sigmoid(double d, double slope) {
  const double s = 1.0 / (1.0 + std::exp(-d * slope));
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = std::nextafter(1.0, 0.0);
  return std::clamp(s, lo, hi);
}

std::vector<double> sample_betas(std::size_t count, double mu, double sigma, std::mt19937_64& rng) {
  std::vector<double> betas(count, mu);
  if (sigma > 0.0) {
    std::normal_distribution<double> gauss(mu, sigma);
    for (double& b : betas) b = gauss(rng);
  }
  return betas;
}

Matrix interpolate(const Matrix& z, std::span<const double> betas) {
  const std::size_t b = z.rows();
  if (b < 2) throw DimensionError("interpolate: need at least 2 rows");
  if (betas.size() != b) throw DimensionError("interpolate: one beta per row required");
  Matrix out(b, z.cols());
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t j = interpolation_partner(i, b);
    for (std::size_t c = 0; c < z.cols(); ++c) {
      out(i, c) = z(i, c) * betas[i] + z(j, c) * (1.0 - betas[i]);
    }
  }
  return out;
}

Matrix interpolate_backward(const Matrix& grad_int, std::span<const double> betas) {
  const std::size_t b = grad_int.rows();
  if (betas.size() != b) throw DimensionError("interpolate_backward: one beta per row required");
  Matrix grad(b, grad_int.cols());
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t j = interpolation_partner(i, b);
    for (std::size_t c = 0; c < grad_int.cols(); ++c) {
      grad(i, c) += betas[i] * grad_int(i, c);
      grad(j, c) += (1.0 - betas[i]) * grad_int(i, c);
    }
  }
  return grad;
}

Matrix sample_interpolations(const Matrix& z, std::mt19937_64& rng, double mu, double sigma) {
  if (z.rows() < 2) throw DimensionError("sample_interpolations: need at least 2 rows");
  return interpolate(z, sample_betas(z.rows(), mu, sigma, rng));
}

}  // namespace gaia
