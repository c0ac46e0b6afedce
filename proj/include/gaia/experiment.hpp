#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gaia/config.hpp"
#include "gaia/metrics.hpp"
#include "gaia/train.hpp"

namespace gaia {

extern const char* const kToolVersion;

/// One (model, dataset, seed) cell of the experiment grid.
struct CellKey {
  std::string model;
  DatasetTag dataset = DatasetTag::Moons;
  std::uint64_t seed = 0;

  /// e.g. "gaia_a0-moons-s3"; the cell's directory below runs/.
  std::string name() const;
};

struct CellOutcome {
  CellKey key;
  bool diverged = false;
  std::size_t steps_done = 0;
  std::string error;
  double seconds = 0.0;
};

struct RunOptions {
  int jobs = 1;
  std::function<void(const std::string&)> log;  // progress lines; may be empty
};

/// Cells in canonical order: dataset, seed, then model in config order.
std::vector<CellKey> grid_cells(const ExperimentConfig& config);

/// Training data for a dataset and seed (standardized, shared by all models).
DataBatch training_data(const ExperimentConfig& config, DatasetTag tag, std::uint64_t seed);

/// Trains every cell and writes runs/<cell>/checkpoint.gck and losses.csv.
/// Diverged cells are reported, not thrown.
std::vector<CellOutcome> train_grid(const ExperimentConfig& config, const std::string& out_dir,
                                    const RunOptions& options = {});

/// Evaluates every checkpoint in out_dir; writes metrics.csv and metrics.json.
std::vector<MetricRecord> evaluate_run(const ExperimentConfig& config, const std::string& out_dir);
/// Reads metrics.csv, writes ols.csv and ols.json.
OlsTable compare_run(const std::string& out_dir);
/// One SVG per (dataset, seed) under figures/, with mesh CSV sidecars.
std::vector<std::string> plot_run(const ExperimentConfig& config, const std::string& out_dir);
/// Latent attribute vectors for the binary features x0 > 0 and x1 > 0 of the
/// standardized eval set; writes attr_vectors.csv.
void attribute_vectors_run(const ExperimentConfig& config, const std::string& out_dir);

struct ExperimentSummary {
  std::vector<CellOutcome> cells;
  std::vector<MetricRecord> records;
  bool any_diverged() const;
};

/// Full pipeline: config snapshot, training, evaluation, figures, OLS table
/// and manifest.json.
ExperimentSummary run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                 const RunOptions& options = {});

void write_manifest(const ExperimentConfig& config, const std::string& out_dir,
                    const std::vector<CellOutcome>& cells, double seconds);
/// Problems found when re-hashing the artifacts listed in manifest.json;
/// empty when everything matches.
std::vector<std::string> verify_manifest(const std::string& out_dir);

/// Reads out_dir/config.ini written by a previous run.
ExperimentConfig load_run_config(const std::string& out_dir);

// ---- file formats ---------------------------------------------------------

std::string points_csv(const Matrix& x);  // header x0,x1,...
std::string gaia_loss_csv(const std::vector<StepLosses>& history);
std::string baseline_loss_csv(const std::vector<BaselineLosses>& history);
std::string metrics_csv(const std::vector<MetricRecord>& records);
std::vector<MetricRecord> parse_metrics_csv(const std::string& text);
std::string metrics_json(const std::vector<MetricRecord>& records);
std::string ols_csv(const OlsTable& table);
std::string ols_json(const OlsTable& table);

}  // namespace gaia
