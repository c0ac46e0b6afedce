#pragma once

#include <cstdint>
#include <string>

#include "gaia/datasets.hpp"
#include "gaia/metrics.hpp"
#include "gaia/models.hpp"

namespace gaia {

struct EvalConfig {
  std::size_t n_eval = 2000;      // held-out points encoded / interpolated
  std::size_t n_reference = 2000; // held-out points the KDE and KL compare against
  std::size_t knn_k = 5;
  std::size_t max_pairs = 200000;
  double interp_mu = 0.5;
  double interp_sigma = 0.25;
};

/// Two independent held-out draws, standardized with the training statistics.
struct EvalSets {
  Matrix eval;
  Matrix reference;
};

EvalSets make_eval_sets(const DatasetKind& kind, const Standardizer& standardizer,
                        const EvalConfig& config, std::uint64_t seed);

/// Interpolated decodes G_d(z_int) of the eval set, seeded.
Matrix interpolation_outputs(const AnyModel& model, const Matrix& x, const EvalConfig& config,
                             std::uint64_t seed);

MetricRecord evaluate_model(const AnyModel& model, const std::string& label,
                            const std::string& dataset, const EvalSets& sets,
                            const EvalConfig& config, std::uint64_t seed);

}  // namespace gaia
