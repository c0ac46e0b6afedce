#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gaia/datasets.hpp"
#include "gaia/evaluate.hpp"
#include "gaia/models.hpp"
#include "gaia/train.hpp"

namespace gaia {

/// One trainable variant in an experiment grid. "gaia_a0" is GAIA with the
/// distance loss switched off.
struct ModelVariant {
  std::string label;
  ModelKind kind = ModelKind::GAIA;
  bool distance_loss = true;
};

ModelVariant model_variant_from_label(const std::string& label);
const std::vector<std::string>& all_model_labels();

/// Full experiment description, read from an INI file:
///   [train] lr batch steps seed
///   [model] latent_dim hidden_width hidden_layers activation
///   [data] n_train noise circle_factor
///   [gaia] sigmoid_slope gamma alpha interp_mu interp_sigma routing
///   [vae] kl_weight recon_variance
///   [eval] n_eval n_reference knn_k max_pairs mesh_resolution
///   [experiment] models datasets replicates
struct ExperimentConfig {
  TrainConfig train;          // model field is set per grid cell
  ArchitectureConfig arch;
  EvalConfig eval;
  std::size_t n_train = 10000;
  double noise = -1.0;        // < 0 keeps each dataset's default
  double circle_factor = 0.5;
  std::size_t mesh_resolution = 20;
  std::vector<std::string> models = all_model_labels();
  std::vector<DatasetTag> datasets = all_dataset_tags();
  std::size_t replicates = 1;  // seeds used: seed, seed + 1, ...

  DatasetKind dataset_kind(DatasetTag tag) const;
  TrainConfig train_config(const ModelVariant& variant, std::uint64_t seed) const;
  std::vector<std::uint64_t> seeds() const;
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Canonical INI text; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const ExperimentConfig& config);

std::vector<std::string> split_list(const std::string& text);

}  // namespace gaia
