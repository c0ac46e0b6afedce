#include "gaia/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "gaia/errors.hpp"

namespace gaia {

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<std::pair<double, double>>& default_centers() {
  static const std::vector<std::pair<double, double>> c{{-2.0, -1.0}, {2.0, -1.0}, {0.0, 2.0}};
  return c;
}

}  // namespace

std::string to_string(DatasetTag tag) {
  switch (tag) {
    case DatasetTag::Moons: return "moons";
    case DatasetTag::Circles: return "circles";
    case DatasetTag::SCurve2D: return "scurve";
    case DatasetTag::SwissRoll2D: return "swissroll";
    case DatasetTag::Blobs: return "blobs";
  }
  return "?";
}

DatasetTag dataset_tag_from_string(const std::string& s) {
  for (DatasetTag t : all_dataset_tags()) {
    if (to_string(t) == s) return t;
  }
  throw ConfigError("unknown dataset '" + s + "'");
}

const std::vector<DatasetTag>& all_dataset_tags() {
  static const std::vector<DatasetTag> tags{DatasetTag::Moons, DatasetTag::Circles,
                                            DatasetTag::SCurve2D, DatasetTag::SwissRoll2D,
                                            DatasetTag::Blobs};
  return tags;
}

DatasetKind DatasetKind::defaults(DatasetTag tag) {
  DatasetKind k;
  k.tag = tag;
  if (tag == DatasetTag::Blobs) k.noise = 0.5;
  return k;
}

void DatasetKind::validate() const {
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("dataset noise must be >= 0");
  if (tag == DatasetTag::Circles && !(circle_factor > 0.0 && circle_factor < 1.0)) {
    throw ConfigError("circle factor must be in (0, 1)");
  }
}

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows() < 2) throw DimensionError("standardize: need at least 2 rows");
  Standardizer s;
  s.mean.assign(x.cols(), 0.0);
  s.scale.assign(x.cols(), 0.0);
  const double n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) sum += x(r, c);
    const double mu = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) ss += (x(r, c) - mu) * (x(r, c) - mu);
    const double sd = std::sqrt(ss / n);
    if (!(sd > 0.0)) throw NumericError("standardize: zero-variance column");
    s.mean[c] = mu;
    s.scale[c] = sd;
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  Matrix out = x;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - mean[c]) / scale[c];
  }
  return out;
}

Matrix Standardizer::invert(const Matrix& x) const {
  Matrix out = x;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = x(r, c) * scale[c] + mean[c];
  }
  return out;
}

Matrix generate_raw(const DatasetKind& kind, std::size_t n, std::uint64_t seed) {
  kind.validate();
  if (n < 2) throw ConfigError("dataset needs at least 2 points");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix x(n, 2);

  switch (kind.tag) {
    case DatasetTag::Moons: {
      // Outer half circle, then the inner one shifted by (1, -0.5).
      const std::size_t n_out = n / 2;
      const std::size_t n_in = n - n_out;
      for (std::size_t i = 0; i < n_out; ++i) {
        const double t = n_out > 1 ? kPi * static_cast<double>(i) / static_cast<double>(n_out - 1) : 0.0;
        x(i, 0) = std::cos(t);
        x(i, 1) = std::sin(t);
      }
      for (std::size_t i = 0; i < n_in; ++i) {
        const double t = n_in > 1 ? kPi * static_cast<double>(i) / static_cast<double>(n_in - 1) : 0.0;
        x(n_out + i, 0) = 1.0 - std::cos(t);
        x(n_out + i, 1) = 1.0 - std::sin(t) - 0.5;
      }
      break;
    }
    case DatasetTag::Circles: {
      const std::size_t n_out = n / 2;
      const std::size_t n_in = n - n_out;
      for (std::size_t i = 0; i < n_out; ++i) {
        const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_out);
        x(i, 0) = std::cos(t);
        x(i, 1) = std::sin(t);
      }
      for (std::size_t i = 0; i < n_in; ++i) {
        const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_in);
        x(n_out + i, 0) = kind.circle_factor * std::cos(t);
        x(n_out + i, 1) = kind.circle_factor * std::sin(t);
      }
      break;
    }
    case DatasetTag::SCurve2D: {
      // 3D S-curve (sin t, h, sign(t)(cos t - 1)) keeping the two curved axes.
      for (std::size_t i = 0; i < n; ++i) {
        const double t = 3.0 * kPi * (unit(rng) - 0.5);
        x(i, 0) = std::sin(t);
        x(i, 1) = (t >= 0.0 ? 1.0 : -1.0) * (std::cos(t) - 1.0);
      }
      break;
    }
    case DatasetTag::SwissRoll2D: {
      for (std::size_t i = 0; i < n; ++i) {
        const double t = 1.5 * kPi * (1.0 + 2.0 * unit(rng));
        x(i, 0) = t * std::cos(t);
        x(i, 1) = t * std::sin(t);
      }
      break;
    }
    case DatasetTag::Blobs: {
      const auto& centers = kind.centers.empty() ? default_centers() : kind.centers;
      // Points cycle through the centers so counts stay balanced.
      for (std::size_t i = 0; i < n; ++i) {
        const auto& c = centers[i % centers.size()];
        x(i, 0) = c.first;
        x(i, 1) = c.second;
      }
      break;
    }
  }

  if (kind.noise > 0.0) {
    std::normal_distribution<double> gauss(0.0, kind.noise);
    for (double& v : x.values()) v += gauss(rng);
  }
  return x;
}

DataBatch generate(const DatasetKind& kind, std::size_t n, std::uint64_t seed) {
  const Matrix raw = generate_raw(kind, n, seed);
  Standardizer s = Standardizer::fit(raw);
  DataBatch batch;
  batch.x = s.apply(raw);
  batch.source = kind.tag;
  batch.seed = seed;
  batch.standardizer = std::move(s);
  return batch;
}

MinibatchStream::MinibatchStream(const DataBatch& data, std::size_t batch_size,
                                 std::uint64_t seed)
    : data_(&data), batch_size_(batch_size), seed_(seed), rng_(seed) {
  if (batch_size < 2) throw ConfigError("batch size must be at least 2");
  if (batch_size > data.x.rows()) {
    throw ConfigError("batch size " + std::to_string(batch_size) + " exceeds dataset size " +
                      std::to_string(data.x.rows()));
  }
  order_.resize(data.x.rows());
  reshuffle();
}

void MinibatchStream::reshuffle() {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  // Explicit Fisher-Yates.
  for (std::size_t i = order_.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng_() % i);
    std::swap(order_[i - 1], order_[j]);
  }
  cursor_ = 0;
}

DataBatch MinibatchStream::next() {
  if (cursor_ + batch_size_ > order_.size()) {
    reshuffle();
    ++epoch_;
  }
  DataBatch out;
  out.x = data_->x.select_rows(std::span<const std::size_t>(order_.data() + cursor_, batch_size_));
  out.source = data_->source;
  out.seed = seed_;
  cursor_ += batch_size_;
  return out;
}

}  // namespace gaia
