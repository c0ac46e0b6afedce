#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gaia/matrix.hpp"

namespace gaia {

// ---- density -------------------------------------------------------------

/// Axis-aligned Gaussian kernel density with Scott's-rule bandwidths
/// h_d = std_d * n^(-1 / (dim + 4)).
struct KdeModel {
  Matrix reference;
  std::vector<double> bandwidth;
};

KdeModel kde_fit(const Matrix& reference);
/// Total log-likelihood (sum over sample rows).
double kde_loglik(const KdeModel& model, const Matrix& samples);

// ---- divergence ----------------------------------------------------------

/// k-nearest-neighbour estimate of KL(p || q):
///   dim/n * sum_i log(nu_k(i) / rho_k(i)) + log(m / (n - 1))
/// rho_k: distance from p_i to its k-th neighbour in p (excluding itself),
/// nu_k: distance from p_i to its k-th neighbour in q. Points of q that
/// coincide exactly with p_i are skipped like the self match, and any
/// remaining zero distance is floored at kKlDistanceFloor times the RMS
/// spread of p. The estimate can be negative.
double kl_divergence(const Matrix& p_samples, const Matrix& q_samples, std::size_t k = 5);

inline constexpr double kKlDistanceFloor = 1e-12;

// ---- structure -----------------------------------------------------------

/// Pearson r between Euclidean pair distances in x and in z (same pairs).
/// Uses every i < j pair when there are at most max_pairs, otherwise
/// max_pairs pairs drawn with a seeded RNG.
double pairwise_distance_correlation(const Matrix& x, const Matrix& z,
                                     std::size_t max_pairs = 200000, std::uint64_t seed = 0);

double pearson(std::span<const double> a, std::span<const double> b);

// ---- aggregation ---------------------------------------------------------

struct MetricRecord {
  std::string model;    // label, e.g. "ae", "vae", "gaia_a0", "gaia"
  std::string dataset;
  double r_xz = 0.0;
  double loglik_interp = 0.0;
  double loglik_recon = 0.0;
  double kl_interp = 0.0;
  double kl_recon = 0.0;
  std::uint64_t seed = 0;
};

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"r_xz", "loglik_interp", "loglik_recon", "kl_interp",
                                              "kl_recon"};
  return names;
}
double metric_value(const MetricRecord& r, const std::string& name);

/// Per-model intercepts for every metric: metric ~ model indicators +
/// dataset dummies (alphabetically first dataset is the reference level).
struct OlsTable {
  std::vector<std::string> models;                  // sorted
  std::map<std::string, std::vector<double>> rows;  // model -> value per metric_names()
};

OlsTable ols_aggregate(std::vector<MetricRecord> records);

// ---- attribute vectors ---------------------------------------------------

/// mean(z | label) - mean(z | !label).
std::vector<double> attribute_vector_mean(const Matrix& z, std::span<const int> labels);

/// OLS of z on [1, attributes]; row a of the result is the coefficient
/// vector of attribute column a.
Matrix attribute_vectors_ols(const Matrix& z, const Matrix& attributes);

/// Least squares solution of design * beta = target (columns solved jointly).
/// Throws NumericError when the design is rank deficient.
Matrix least_squares(const Matrix& design, const Matrix& target);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace gaia
