#include "gaia/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "gaia/errors.hpp"
#include "gaia/kernels.hpp"

namespace gaia {

KdeModel kde_fit(const Matrix& reference) {
  const std::size_t n = reference.rows();
  const std::size_t dim = reference.cols();
  if (n < 2) throw DimensionError("kde_fit: need at least 2 reference points");
  require_finite(reference, "kde_fit reference");
  const double factor = std::pow(static_cast<double>(n), -1.0 / static_cast<double>(dim + 4));
  KdeModel model{reference, std::vector<double>(dim)};
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += reference(i, d);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (reference(i, d) - mean) * (reference(i, d) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw NumericError("kde_fit: zero-variance reference column");
    model.bandwidth[d] = sd * factor;
  }
  return model;
}

double kde_loglik(const KdeModel& model, const Matrix& samples) {
  if (samples.cols() != model.reference.cols()) throw DimensionError("kde_loglik: dimension mismatch");
  require_finite(samples, "kde_loglik samples");
  const auto logp = kernels::kde_log_density(samples, model.reference, model.bandwidth);
  double total = 0.0;
  for (double v : logp) total += v;
  return total;
}

namespace {

// Distance to the k-th neighbour in q, skipping exact coincidences with the query.
std::vector<double> kth_distinct_neighbor(const Matrix& p, const Matrix& q, std::size_t k) {
  const Matrix d2 = kernels::pairwise_sq_dists(p, q);
  std::vector<double> out(p.rows());
  std::vector<double> row;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    row.clear();
    for (double v : d2.row(i)) {
      if (v > 0.0) row.push_back(v);
    }
    if (row.size() < k) throw DimensionError("kl_divergence: q has fewer than k distinct neighbours");
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k - 1), row.end());
    out[i] = std::sqrt(row[k - 1]);
  }
  return out;
}

bool has_zero_cross_distance(const Matrix& p, const Matrix& q) {
  std::set<std::pair<double, double>> seen;
  if (p.cols() != 2) {
    // Generic path: exact row comparison.
    for (std::size_t i = 0; i < p.rows(); ++i) {
      for (std::size_t j = 0; j < q.rows(); ++j) {
        if (std::equal(p.row(i).begin(), p.row(i).end(), q.row(j).begin())) return true;
      }
    }
    return false;
  }
  for (std::size_t j = 0; j < q.rows(); ++j) seen.emplace(q(j, 0), q(j, 1));
  for (std::size_t i = 0; i < p.rows(); ++i) {
    if (seen.contains({p(i, 0), p(i, 1)})) return true;
  }
  return false;
}

}  // namespace

double kl_divergence(const Matrix& p, const Matrix& q, std::size_t k) {
  if (p.cols() != q.cols()) throw DimensionError("kl_divergence: dimension mismatch");
  if (k == 0) throw DimensionError("kl_divergence: k must be >= 1");
  if (p.rows() < k + 1 || q.rows() < k + 1) {
    throw DimensionError("kl_divergence: both sets need at least k + 1 points");
  }
  require_finite(p, "kl_divergence p");
  require_finite(q, "kl_divergence q");
  const double n = static_cast<double>(p.rows());
  const double m = static_cast<double>(q.rows());
  const double dim = static_cast<double>(p.cols());

  double spread = 0.0;
  for (std::size_t c = 0; c < p.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i) mean += p(i, c);
    mean /= n;
    for (std::size_t i = 0; i < p.rows(); ++i) spread += (p(i, c) - mean) * (p(i, c) - mean);
  }
  spread = std::sqrt(spread / n);
  const double floor = kKlDistanceFloor * (spread > 0.0 ? spread : 1.0);

  const auto rho = kernels::kth_neighbor_distances(p, p, k, /*exclude_self=*/true);
  const auto nu = has_zero_cross_distance(p, q) ? kth_distinct_neighbor(p, q, k)
                                                : kernels::kth_neighbor_distances(p, q, k, false);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    sum += std::log(std::max(nu[i], floor) / std::max(rho[i], floor));
  }
  return dim / n * sum + std::log(m / (n - 1.0));
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw DimensionError("pearson: need two equal-length series");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) throw NumericError("pearson: constant series, correlation undefined");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double pairwise_distance_correlation(const Matrix& x, const Matrix& z, std::size_t max_pairs,
                                     std::uint64_t seed) {
  if (x.rows() != z.rows()) throw DimensionError("distance correlation: row counts differ");
  if (x.rows() < 3) throw DimensionError("distance correlation: need at least 3 rows");
  const std::size_t n = x.rows();
  const std::size_t total = n * (n - 1) / 2;
  auto dist = [](const Matrix& m, std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) s += (m(i, c) - m(j, c)) * (m(i, c) - m(j, c));
    return std::sqrt(s);
  };
  std::vector<double> dx, dz;
  if (total <= max_pairs) {
    dx.reserve(total);
    dz.reserve(total);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        dx.push_back(dist(x, i, j));
        dz.push_back(dist(z, i, j));
      }
    }
  } else {
    std::mt19937_64 rng(seed);
    dx.reserve(max_pairs);
    dz.reserve(max_pairs);
    while (dx.size() < max_pairs) {
      const std::size_t i = static_cast<std::size_t>(rng() % n);
      const std::size_t j = static_cast<std::size_t>(rng() % n);
      if (i == j) continue;
      dx.push_back(dist(x, i, j));
      dz.push_back(dist(z, i, j));
    }
  }
  return pearson(dx, dz);
}

double metric_value(const MetricRecord& r, const std::string& name) {
  if (name == "r_xz") return r.r_xz;
  if (name == "loglik_interp") return r.loglik_interp;
  if (name == "loglik_recon") return r.loglik_recon;
  if (name == "kl_interp") return r.kl_interp;
  if (name == "kl_recon") return r.kl_recon;
  throw Error("unknown metric '" + name + "'");
}

Matrix least_squares(const Matrix& design, const Matrix& target) {
  if (design.rows() != target.rows()) throw DimensionError("least_squares: row counts differ");
  if (design.rows() < design.cols()) throw NumericError("least_squares: fewer rows than unknowns");
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> a(design.data(), static_cast<Eigen::Index>(design.rows()),
                             static_cast<Eigen::Index>(design.cols()));
  Eigen::Map<const RowMat> y(target.data(), static_cast<Eigen::Index>(target.rows()),
                             static_cast<Eigen::Index>(target.cols()));
  Eigen::ColPivHouseholderQR<RowMat> qr(a);
  if (qr.rank() < a.cols()) throw NumericError("least_squares: design matrix is rank deficient");
  const RowMat beta = qr.solve(RowMat(y));
  Matrix out(design.cols(), target.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      out(r, c) = beta(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

OlsTable ols_aggregate(std::vector<MetricRecord> records) {
  if (records.empty()) throw Error("ols_aggregate: no records");
  // Solve in canonical (sorted) order.
  std::sort(records.begin(), records.end(), [](const MetricRecord& a, const MetricRecord& b) {
    return std::tie(a.model, a.dataset, a.seed, a.r_xz, a.loglik_interp, a.kl_interp) <
           std::tie(b.model, b.dataset, b.seed, b.r_xz, b.loglik_interp, b.kl_interp);
  });
  std::set<std::string> model_set, dataset_set;
  for (const auto& r : records) {
    model_set.insert(r.model);
    dataset_set.insert(r.dataset);
  }
  const std::vector<std::string> models(model_set.begin(), model_set.end());
  const std::vector<std::string> datasets(dataset_set.begin(), dataset_set.end());

  const std::size_t cols = models.size() + datasets.size() - 1;
  Matrix design(records.size(), cols);
  Matrix target(records.size(), metric_names().size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto mi = std::lower_bound(models.begin(), models.end(), r.model) - models.begin();
    design(i, static_cast<std::size_t>(mi)) = 1.0;
    const auto di = std::lower_bound(datasets.begin(), datasets.end(), r.dataset) - datasets.begin();
    if (di > 0) design(i, models.size() + static_cast<std::size_t>(di) - 1) = 1.0;
    for (std::size_t m = 0; m < metric_names().size(); ++m) {
      target(i, m) = metric_value(r, metric_names()[m]);
    }
  }
  const Matrix beta = least_squares(design, target);
  OlsTable table;
  table.models = models;
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    auto row = beta.row(mi);
    table.rows[models[mi]] = std::vector<double>(row.begin(), row.end());
  }
  return table;
}

std::vector<double> attribute_vector_mean(const Matrix& z, std::span<const int> labels) {
  if (labels.size() != z.rows()) throw DimensionError("attribute_vector_mean: one label per row");
  std::vector<double> pos(z.cols(), 0.0), neg(z.cols(), 0.0);
  std::size_t np = 0, nn = 0;
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto& acc = labels[i] ? pos : neg;
    (labels[i] ? np : nn) += 1;
    for (std::size_t c = 0; c < z.cols(); ++c) acc[c] += z(i, c);
  }
  if (np == 0 || nn == 0) throw NumericError("attribute_vector_mean: both label classes must be present");
  std::vector<double> out(z.cols());
  for (std::size_t c = 0; c < z.cols(); ++c) {
    out[c] = pos[c] / static_cast<double>(np) - neg[c] / static_cast<double>(nn);
  }
  return out;
}

Matrix attribute_vectors_ols(const Matrix& z, const Matrix& attributes) {
  if (attributes.rows() != z.rows()) throw DimensionError("attribute_vectors_ols: row counts differ");
  Matrix design(z.rows(), attributes.cols() + 1);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    design(i, 0) = 1.0;
    for (std::size_t a = 0; a < attributes.cols(); ++a) design(i, a + 1) = attributes(i, a);
  }
  const Matrix beta = least_squares(design, z);
  return beta.slice_rows(1, attributes.cols());
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("cosine_similarity: length mismatch");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (!(aa > 0.0) || !(bb > 0.0)) throw NumericError("cosine_similarity: zero vector");
  return ab / std::sqrt(aa * bb);
}

}  // namespace gaia
