#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaia/errors.hpp"
#include "gaia/metrics.hpp"
#include "support.hpp"

using namespace gaia;
using namespace gaia::testing;

TEST_CASE("kde: Scott bandwidth and a hand-computed 1D mixture") {
  const Matrix ref{{-1.0}, {0.0}, {0.5}, {2.0}, {3.5}};
  const KdeModel m = kde_fit(ref);
  REQUIRE(m.bandwidth.size() == 1);
  CHECK(m.bandwidth[0] == doctest::Approx(1.2812415376315094).epsilon(1e-13));
  CHECK(kde_loglik(m, Matrix{{1.2}}) == doctest::Approx(-1.7617782930164168).epsilon(1e-13));
}

TEST_CASE("kde: in-support samples score above far-away samples") {
  std::mt19937_64 rng(1);
  const Matrix ref = gaussian_matrix(500, 2, rng);
  const KdeModel m = kde_fit(ref);
  Matrix far = ref;
  for (double& v : far.values()) v += 50.0;
  const double near_ll = kde_loglik(m, ref);
  CHECK(std::isfinite(near_ll));
  CHECK(near_ll > kde_loglik(m, far));
}

TEST_CASE("kde: single cluster, mean vs 100 sigma away") {
  std::mt19937_64 rng(2);
  const Matrix ref = gaussian_matrix(200, 2, rng, 0.1);
  const KdeModel m = kde_fit(ref);
  const double at_mean = kde_loglik(m, Matrix{{0.0, 0.0}});
  const double far = kde_loglik(m, Matrix{{10.0, 0.0}});
  CHECK(at_mean - far > 100.0);
}

TEST_CASE("kde: invariant to reference and sample order") {
  std::mt19937_64 rng(3);
  const Matrix ref = gaussian_matrix(300, 2, rng);
  const Matrix s = gaussian_matrix(100, 2, rng);
  std::vector<std::size_t> p(300), q(100);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::iota(q.begin(), q.end(), std::size_t{0});
  std::shuffle(p.begin(), p.end(), rng);
  std::shuffle(q.begin(), q.end(), rng);
  const double a = kde_loglik(kde_fit(ref), s);
  const double b = kde_loglik(kde_fit(ref.select_rows(p)), s.select_rows(q));
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("kde: degenerate reference is an error") {
  CHECK_THROWS_AS(kde_fit(Matrix(10, 2, 3.0)), NumericError);
  CHECK_THROWS_AS(kde_fit(Matrix(1, 2)), DimensionError);
  CHECK_THROWS_AS(kde_loglik(kde_fit(Matrix{{0, 1}, {1, 0}, {2, 2}}), Matrix(1, 3)), DimensionError);
}

TEST_CASE("kl: same distribution is near zero") {
  std::mt19937_64 rng(4);
  const Matrix p = gaussian_matrix(10000, 2, rng), q = gaussian_matrix(10000, 2, rng);
  CHECK(std::abs(kl_divergence(p, q)) < 0.05);
}

TEST_CASE("kl: a 10 sigma shift is large") {
  std::mt19937_64 rng(5);
  const Matrix p = gaussian_matrix(2000, 2, rng);
  Matrix q = gaussian_matrix(2000, 2, rng);
  for (std::size_t i = 0; i < q.rows(); ++i) q(i, 0) += 10.0;
  CHECK(kl_divergence(p, q) > 5.0);
}

TEST_CASE("kl: identical and duplicated sets stay finite") {
  std::mt19937_64 rng(6);
  const Matrix p = gaussian_matrix(1000, 2, rng);
  const double self = kl_divergence(p, p);
  CHECK(std::isfinite(self));
  CHECK(std::abs(self) < 0.01);
  const Matrix dup = p.slice_rows(0, 10);
  Matrix repeated(20, 2);
  for (std::size_t i = 0; i < 20; ++i) {
    repeated(i, 0) = dup(i % 10, 0);
    repeated(i, 1) = dup(i % 10, 1);
  }
  CHECK(std::isfinite(kl_divergence(repeated, p)));
}

TEST_CASE("kl: argument checks") {
  CHECK_THROWS_AS(kl_divergence(Matrix(10, 2), Matrix(10, 3)), DimensionError);
  CHECK_THROWS_AS(kl_divergence(Matrix(5, 2), Matrix(10, 2), 5), DimensionError);
  CHECK_THROWS_AS(kl_divergence(Matrix(10, 2), Matrix(10, 2), 0), DimensionError);
}

TEST_CASE("distance correlation: similarity transforms give r = 1") {
  std::mt19937_64 rng(7);
  const Matrix x = gaussian_matrix(200, 2, rng);
  CHECK(pairwise_distance_correlation(x, x) == doctest::Approx(1.0).epsilon(1e-12));
  const double th = 0.7;
  Matrix z(200, 2);
  for (std::size_t i = 0; i < 200; ++i) {
    z(i, 0) = 3.0 * (std::cos(th) * x(i, 0) - std::sin(th) * x(i, 1)) + 5.0;
    z(i, 1) = 3.0 * (std::sin(th) * x(i, 0) + std::cos(th) * x(i, 1)) - 2.0;
  }
  CHECK(pairwise_distance_correlation(x, z) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pairwise_distance_correlation(x, z, 500, 3) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("distance correlation: shuffled rows decorrelate") {
  std::mt19937_64 rng(8);
  const Matrix x = gaussian_matrix(500, 2, rng);
  std::vector<std::size_t> perm(500);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  CHECK(std::abs(pairwise_distance_correlation(x, x.select_rows(perm))) < 0.1);
}

TEST_CASE("distance correlation: rigid motion invariance and subsampling determinism") {
  std::mt19937_64 rng(9);
  const Matrix x = gaussian_matrix(300, 2, rng), z = gaussian_matrix(300, 2, rng) + x;
  Matrix moved = z;
  for (std::size_t i = 0; i < 300; ++i) {
    moved(i, 0) = -z(i, 1) + 1.0;
    moved(i, 1) = z(i, 0) - 4.0;
  }
  CHECK(pairwise_distance_correlation(x, z) == doctest::Approx(pairwise_distance_correlation(x, moved)).epsilon(1e-10));
  CHECK(pairwise_distance_correlation(x, z, 1000, 4) == pairwise_distance_correlation(x, z, 1000, 4));
  const double r = pairwise_distance_correlation(x, z, 1000, 4);
  CHECK(r >= -1.0);
  CHECK(r <= 1.0);
  CHECK_THROWS_AS(pairwise_distance_correlation(Matrix(2, 2), Matrix(2, 2)), DimensionError);
  CHECK_THROWS_AS(pairwise_distance_correlation(x, Matrix(300, 2, 1.0)), NumericError);
}

namespace {

MetricRecord record(const std::string& model, const std::string& dataset, double value, std::uint64_t seed = 0) {
  MetricRecord r;
  r.model = model;
  r.dataset = dataset;
  r.seed = seed;
  r.r_xz = value;
  r.loglik_interp = 2 * value;
  r.loglik_recon = value + 1;
  r.kl_interp = -value;
  r.kl_recon = value * value;
  return r;
}

}  // namespace

TEST_CASE("ols: single dataset collapses to group means") {
  std::vector<MetricRecord> recs{record("a", "moons", 1.0, 0), record("a", "moons", 3.0, 1),
                                 record("b", "moons", 10.0, 0), record("b", "moons", 14.0, 1)};
  const OlsTable t = ols_aggregate(recs);
  REQUIRE(t.models == std::vector<std::string>{"a", "b"});
  CHECK(t.rows.at("a")[0] == doctest::Approx(2.0));
  CHECK(t.rows.at("b")[0] == doctest::Approx(12.0));
  CHECK(t.rows.at("b")[0] - t.rows.at("a")[0] == doctest::Approx(10.0));
}

TEST_CASE("ols: planted model and dataset effects are recovered") {
  const std::map<std::string, double> model_effect{{"ae", 0.5}, {"gaia", 0.9}, {"vae", 0.6}};
  const std::map<std::string, double> dataset_effect{{"blobs", 0.0}, {"circles", -0.2}, {"moons", 0.3}};
  std::vector<MetricRecord> recs;
  for (const auto& [m, me] : model_effect) {
    for (const auto& [d, de] : dataset_effect) recs.push_back(record(m, d, me + de));
  }
  const OlsTable t = ols_aggregate(recs);
  for (const auto& [m, me] : model_effect) CHECK(std::abs(t.rows.at(m)[0] - me) < 1e-9);
}

TEST_CASE("ols: record order does not matter") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  std::vector<MetricRecord> recs;
  for (const char* m : {"ae", "vae", "gaia"}) {
    for (const char* d : {"moons", "circles", "blobs", "scurve"}) {
      for (std::uint64_t s = 0; s < 3; ++s) recs.push_back(record(m, d, g(rng), s));
    }
  }
  const OlsTable a = ols_aggregate(recs);
  std::shuffle(recs.begin(), recs.end(), rng);
  const OlsTable b = ols_aggregate(recs);
  CHECK(a.rows == b.rows);
}

TEST_CASE("ols: rank-deficient design is an error") {
  // Model and dataset perfectly confounded.
  std::vector<MetricRecord> recs{record("a", "moons", 1.0), record("b", "circles", 2.0)};
  CHECK_THROWS_AS(ols_aggregate(recs), NumericError);
  CHECK_THROWS(ols_aggregate({}));
}

TEST_CASE("attribute_vector_mean: hand case, antisymmetry and zero effect") {
  const Matrix z{{1, 0}, {3, 0}, {0, 0}, {0, 2}};
  const std::vector<int> labels{1, 1, 0, 0};
  const auto v = attribute_vector_mean(z, labels);
  CHECK(v == std::vector<double>{2.0, -1.0});
  const std::vector<int> flipped{0, 0, 1, 1};
  CHECK(attribute_vector_mean(z, flipped) == std::vector<double>{-2.0, 1.0});
  const Matrix same{{1, 1}, {1, 1}, {1, 1}, {1, 1}};
  CHECK(attribute_vector_mean(same, labels) == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(attribute_vector_mean(z, std::vector<int>{1, 1, 1, 1}), NumericError);
}

TEST_CASE("attribute_vectors_ols: one attribute equals the mean difference") {
  std::mt19937_64 rng(11);
  const Matrix z = gaussian_matrix(200, 3, rng);
  std::vector<int> labels(200);
  Matrix a(200, 1);
  for (std::size_t i = 0; i < 200; ++i) {
    labels[i] = (rng() % 3 == 0) ? 1 : 0;
    a(i, 0) = labels[i];
  }
  const Matrix ols = attribute_vectors_ols(z, a);
  const auto mean = attribute_vector_mean(z, labels);
  for (std::size_t c = 0; c < 3; ++c) CHECK(ols(0, c) == doctest::Approx(mean[c]).epsilon(1e-10));
}

TEST_CASE("attribute_vectors_ols: zero-effect attribute stays within 3 standard errors") {
  std::mt19937_64 rng(12);
  const std::size_t n = 2000;
  const Matrix z = gaussian_matrix(n, 2, rng);
  Matrix a(n, 1);
  std::size_t n1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    a(i, 0) = (rng() & 1) ? 1.0 : 0.0;
    n1 += static_cast<std::size_t>(a(i, 0));
  }
  const Matrix ols = attribute_vectors_ols(z, a);
  const double se = std::sqrt(1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n - n1));
  for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(ols(0, c)) < 3.0 * se);
}

TEST_CASE("attribute_vectors_ols: collinear attributes are rejected") {
  Matrix a(10, 2);
  for (std::size_t i = 0; i < 10; ++i) a(i, 0) = a(i, 1) = static_cast<double>(i % 2);
  CHECK_THROWS_AS(attribute_vectors_ols(Matrix(10, 2, 1.0), a), NumericError);
}

TEST_CASE("cosine similarity") {
  CHECK(cosine_similarity(std::vector<double>{1, 0}, std::vector<double>{0, 3}) == doctest::Approx(0.0));
  CHECK(cosine_similarity(std::vector<double>{1, 1}, std::vector<double>{2, 2}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cosine_similarity(std::vector<double>{0, 0}, std::vector<double>{1, 0}), NumericError);
}

TEST_CASE("metric names and values") {
  const MetricRecord r = record("ae", "moons", 0.25);
  CHECK(metric_names().size() == 5);
  CHECK(metric_value(r, "r_xz") == 0.25);
  CHECK(metric_value(r, "kl_interp") == -0.25);
  CHECK_THROWS(metric_value(r, "fid"));
}
