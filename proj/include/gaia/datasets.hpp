#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gaia/matrix.hpp"

namespace gaia {

enum class DatasetTag { Moons, Circles, SCurve2D, SwissRoll2D, Blobs };

std::string to_string(DatasetTag tag);
DatasetTag dataset_tag_from_string(const std::string& s);
const std::vector<DatasetTag>& all_dataset_tags();

struct DatasetKind {
  DatasetTag tag = DatasetTag::Moons;
  double noise = 0.05;
  double circle_factor = 0.5;                   // inner/outer radius ratio (Circles)
  std::vector<std::pair<double, double>> centers;  // Blobs; empty means the default three

  static DatasetKind defaults(DatasetTag tag);
  void validate() const;
};

/// Per-column affine standardization, kept so generated points can be mapped back.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // population standard deviation

  static Standardizer fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
  Matrix invert(const Matrix& x) const;
};

struct DataBatch {
  Matrix x;
  DatasetTag source = DatasetTag::Moons;
  std::uint64_t seed = 0;
  std::optional<Standardizer> standardizer;  // set on full generated datasets
};

/// Raw points before standardization. Pure function of (kind, n, seed).
Matrix generate_raw(const DatasetKind& kind, std::size_t n, std::uint64_t seed);

/// Standardized dataset (zero mean, unit variance per column).
DataBatch generate(const DatasetKind& kind, std::size_t n, std::uint64_t seed);

/// Endless seeded minibatch stream. Each epoch is a fresh permutation; a
/// trailing partial batch is dropped.
class MinibatchStream {
 public:
  MinibatchStream(const DataBatch& data, std::size_t batch_size, std::uint64_t seed);

  DataBatch next();
  std::size_t batch_size() const noexcept { return batch_size_; }
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  void reshuffle();

  const DataBatch* data_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  std::size_t epoch_ = 0;
};

}  // namespace gaia
