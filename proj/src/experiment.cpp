#include "gaia/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "gaia/checkpoint.hpp"
#include "gaia/errors.hpp"
#include "gaia/evaluate.hpp"
#include "gaia/hashing.hpp"
#include "gaia/viz.hpp"

namespace gaia {

namespace fs = std::filesystem;
using nlohmann::json;

const char* const kToolVersion = "gaia-lab 0.1.0";

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const fs::path& a, const std::string& b) { return (a / b).string(); }

std::string cell_dir(const std::string& out, const CellKey& key) {
  return (fs::path(out) / "runs" / key.name()).string();
}

std::string checkpoint_path(const std::string& out, const CellKey& key) {
  return join(cell_dir(out, key), "checkpoint.gck");
}

void say(const RunOptions& o, const std::string& line) {
  if (o.log) o.log(line);
}

}  // namespace

std::string CellKey::name() const { return model + "-" + to_string(dataset) + "-s" + std::to_string(seed); }

bool ExperimentSummary::any_diverged() const {
  return std::any_of(cells.begin(), cells.end(), [](const CellOutcome& c) { return c.diverged; });
}

std::vector<CellKey> grid_cells(const ExperimentConfig& config) {
  std::vector<CellKey> cells;
  for (DatasetTag d : config.datasets) {
    for (std::uint64_t s : config.seeds()) {
      for (const auto& m : config.models) cells.push_back({m, d, s});
    }
  }
  return cells;
}

DataBatch training_data(const ExperimentConfig& config, DatasetTag tag, std::uint64_t seed) {
  return generate(config.dataset_kind(tag), config.n_train, derive_seed(seed, 50));
}

std::vector<CellOutcome> train_grid(const ExperimentConfig& config, const std::string& out_dir,
                                    const RunOptions& options) {
  config.validate();
  const auto cells = grid_cells(config);
  std::vector<CellOutcome> outcomes(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const CellKey& key = cells[i];
      CellOutcome& out = outcomes[i];
      out.key = key;
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const DataBatch data = training_data(config, key.dataset, key.seed);
        const TrainConfig tc = config.train_config(model_variant_from_label(key.model), key.seed);
        try {
          TrainResult result = train(data, tc, config.arch);
          out.steps_done = result.steps_done;
          const std::string dir = cell_dir(out_dir, key);
          save_checkpoint(join(dir, "checkpoint.gck"),
                          Checkpoint{std::move(result.model), std::move(result.optimizer_states),
                                     result.steps_done, to_ini(config)});
          write_file(join(dir, "losses.csv"), tc.model == ModelKind::GAIA
                                                  ? gaia_loss_csv(result.gaia_history)
                                                  : baseline_loss_csv(result.baseline_history));
        } catch (const DivergenceError& e) {
          out.diverged = true;
          out.steps_done = e.step();
          out.error = e.what();
        }
        out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::lock_guard lock(log_mutex);
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-28s %s  (%.1fs)", key.name().c_str(),
                      out.diverged ? out.error.c_str() : "done", out.seconds);
        say(options, buf);
      } catch (...) {
        std::lock_guard lock(log_mutex);
        if (!failure) failure = std::current_exception();
        next = cells.size();
      }
    }
  };

  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(cells.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return outcomes;
}

namespace {

struct CellModel {
  CellKey key;
  AnyModel model;
};

// Checkpoints present in out_dir, in grid order, grouped by (dataset, seed).
std::vector<std::vector<CellModel>> load_grid(const ExperimentConfig& config, const std::string& out_dir) {
  std::vector<std::vector<CellModel>> groups;
  std::pair<DatasetTag, std::uint64_t> current{};
  for (const CellKey& key : grid_cells(config)) {
    const std::string path = checkpoint_path(out_dir, key);
    if (!fs::exists(path)) continue;
    const ModelKind kind = model_variant_from_label(key.model).kind;
    CellModel cm{key, load_checkpoint(path, kind, config.arch).model};
    if (groups.empty() || current != std::make_pair(key.dataset, key.seed)) {
      groups.emplace_back();
      current = {key.dataset, key.seed};
    }
    groups.back().push_back(std::move(cm));
  }
  return groups;
}

EvalSets eval_sets_for(const ExperimentConfig& config, DatasetTag tag, std::uint64_t seed) {
  const DataBatch data = training_data(config, tag, seed);
  return make_eval_sets(config.dataset_kind(tag), *data.standardizer, config.eval, seed);
}

}  // namespace

std::vector<MetricRecord> evaluate_run(const ExperimentConfig& config, const std::string& out_dir) {
  std::vector<MetricRecord> records;
  for (const auto& group : load_grid(config, out_dir)) {
    const auto& first = group.front().key;
    const EvalSets sets = eval_sets_for(config, first.dataset, first.seed);
    for (const auto& cm : group) {
      records.push_back(
          evaluate_model(cm.model, cm.key.model, to_string(cm.key.dataset), sets, config.eval, cm.key.seed));
    }
  }
  if (records.empty()) throw IoError("no checkpoints found under '" + out_dir + "/runs'");
  write_file(join(out_dir, "metrics.csv"), metrics_csv(records));
  write_file(join(out_dir, "metrics.json"), metrics_json(records));
  return records;
}

OlsTable compare_run(const std::string& out_dir) {
  const auto records = parse_metrics_csv(read_file(join(out_dir, "metrics.csv")));
  const OlsTable table = ols_aggregate(records);
  write_file(join(out_dir, "ols.csv"), ols_csv(table));
  write_file(join(out_dir, "ols.json"), ols_json(table));
  return table;
}

namespace {

MeshGrid mesh_or_empty(const std::function<MeshGrid()>& make) {
  try {
    return make();
  } catch (const Error&) {
    // Empty mesh for degenerate (collapsed) point sets.
    return MeshGrid{};
  }
}

}  // namespace

std::vector<std::string> plot_run(const ExperimentConfig& config, const std::string& out_dir) {
  std::vector<std::string> written;
  const fs::path fig_dir = fs::path(out_dir) / "figures";
  for (const auto& group : load_grid(config, out_dir)) {
    const auto& first = group.front().key;
    const EvalSets sets = eval_sets_for(config, first.dataset, first.seed);
    std::vector<ModelPanels> panels;
    for (const auto& cm : group) {
      ModelPanels p;
      p.label = cm.key.model;
      p.data = sets.reference;
      p.interpolations = interpolation_outputs(cm.model, sets.eval, config.eval, cm.key.seed);
      const Matrix z = encode(cm.model, sets.eval);
      if (z.cols() == 2) {
        p.latent_mesh = mesh_or_empty([&] { return latent_meshgrid(cm.model, z, config.mesh_resolution); });
      }
      p.data_mesh = mesh_or_empty([&] { return data_meshgrid(cm.model, sets.eval, config.mesh_resolution); });
      p.reconstructions = reconstruct(cm.model, sets.eval);
      panels.push_back(std::move(p));
    }
    const std::string stem = to_string(first.dataset) + "_s" + std::to_string(first.seed);
    RenderOptions opt;
    opt.title = to_string(first.dataset) + ", seed " + std::to_string(first.seed);
    const RenderedFigure fig = render_figure(panels, opt);
    const std::string svg = (fig_dir / (stem + ".svg")).string();
    write_file(svg, fig.svg);
    written.push_back(svg);
    for (const auto& [name, body] : fig.sidecars) {
      write_file((fig_dir / (stem + "_" + name)).string(), body);
    }
  }
  return written;
}

void attribute_vectors_run(const ExperimentConfig& config, const std::string& out_dir) {
  std::string csv = "model,dataset,seed,attribute,method";
  for (std::size_t d = 0; d < config.arch.latent_dim; ++d) csv += ",z" + std::to_string(d);
  csv += ",cosine_mean_ols\n";
  for (const auto& group : load_grid(config, out_dir)) {
    const auto& first = group.front().key;
    const EvalSets sets = eval_sets_for(config, first.dataset, first.seed);
    const Matrix& x = sets.eval;
    Matrix attrs(x.rows(), 2);
    std::vector<std::vector<int>> labels(2, std::vector<int>(x.rows()));
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t a = 0; a < 2; ++a) {
        labels[a][i] = x(i, a) > 0.0 ? 1 : 0;
        attrs(i, a) = labels[a][i];
      }
    }
    for (const auto& cm : group) {
      const Matrix z = encode(cm.model, x);
      const Matrix ols = attribute_vectors_ols(z, attrs);
      for (std::size_t a = 0; a < 2; ++a) {
        const auto mean = attribute_vector_mean(z, labels[a]);
        const auto ols_row = ols.row(a);
        const std::string prefix = cm.key.model + "," + to_string(cm.key.dataset) + "," +
                                   std::to_string(cm.key.seed) + ",x" + std::to_string(a) + "_positive,";
        const std::string cos = g17(cosine_similarity(mean, ols_row));
        csv += prefix + "mean";
        for (double v : mean) csv += "," + g17(v);
        csv += "," + cos + "\n" + prefix + "ols";
        for (double v : ols_row) csv += "," + g17(v);
        csv += "," + cos + "\n";
      }
    }
  }
  write_file(join(out_dir, "attr_vectors.csv"), csv);
}

ExperimentConfig load_run_config(const std::string& out_dir) {
  const std::string path = join(out_dir, "config.ini");
  if (!fs::exists(path)) throw IoError("'" + path + "' not found; run `train` into this directory first");
  return parse_config(read_file(path));
}

ExperimentSummary run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                                 const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  config.validate();
  write_file(join(out_dir, "config.ini"), to_ini(config));
  ExperimentSummary summary;
  summary.cells = train_grid(config, out_dir, options);
  const bool any_trained =
      std::any_of(summary.cells.begin(), summary.cells.end(), [](const CellOutcome& c) { return !c.diverged; });
  if (any_trained) {
    say(options, "evaluating");
    summary.records = evaluate_run(config, out_dir);
    say(options, "plotting");
    plot_run(config, out_dir);
    std::set<std::string> models, datasets;
    for (const auto& r : summary.records) {
      models.insert(r.model);
      datasets.insert(r.dataset);
    }
    if (summary.records.size() >= models.size() + datasets.size()) compare_run(out_dir);
  }
  write_manifest(config, out_dir, summary.cells,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  return summary;
}

void write_manifest(const ExperimentConfig& config, const std::string& out_dir,
                    const std::vector<CellOutcome>& cells, double seconds) {
  json m;
  m["tool_version"] = kToolVersion;
  m["seed"] = config.train.seed;
  m["config"] = to_ini(config);
  m["wall_clock_seconds"] = seconds;
  m["cells"] = json::array();
  for (const auto& c : cells) {
    json cell{{"name", c.key.name()},
              {"model", c.key.model},
              {"dataset", to_string(c.key.dataset)},
              {"seed", c.key.seed},
              {"status", c.diverged ? "diverged" : "ok"},
              {"steps_done", c.steps_done},
              {"seconds", c.seconds}};
    if (c.diverged) cell["error"] = c.error;
    m["cells"].push_back(cell);
  }
  std::vector<std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(out_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), out_dir).generic_string();
    if (rel == "manifest.json" || rel.ends_with(".tmp")) continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  m["artifacts"] = json::object();
  for (const auto& f : files) m["artifacts"][f] = sha256_file(join(out_dir, f));
  write_file(join(out_dir, "manifest.json"), m.dump(2) + "\n");
}

std::vector<std::string> verify_manifest(const std::string& out_dir) {
  json m;
  try {
    m = json::parse(read_file(join(out_dir, "manifest.json")));
  } catch (const json::exception& e) {
    throw CorruptionError(std::string("manifest.json: ") + e.what());
  }
  std::vector<std::string> problems;
  for (const auto& [rel, hash] : m.at("artifacts").items()) {
    const std::string path = join(out_dir, rel);
    if (!fs::exists(path)) problems.push_back(rel + ": missing");
    else if (sha256_file(path) != hash.get<std::string>()) problems.push_back(rel + ": hash mismatch");
  }
  return problems;
}

// ---- file formats ---------------------------------------------------------

std::string points_csv(const Matrix& x) {
  std::string out;
  for (std::size_t c = 0; c < x.cols(); ++c) out += (c ? ",x" : "x") + std::to_string(c);
  out += "\n";
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out += (c ? "," : "") + g17(x(r, c));
    out += "\n";
  }
  return out;
}

std::string gaia_loss_csv(const std::vector<StepLosses>& history) {
  std::string out = "step,L_x,L_x_gen,L_x_int,L_distance,delta_disc,w_gen_int,w_disc_fake\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& s = history[i];
    out += std::to_string(i) + "," + g17(s.l_x) + "," + g17(s.l_x_gen) + "," + g17(s.l_x_int) + "," +
           g17(s.l_distance) + "," + g17(s.delta_disc) + "," + g17(s.w_gen_int) + "," + g17(s.w_disc_fake) + "\n";
  }
  return out;
}

std::string baseline_loss_csv(const std::vector<BaselineLosses>& history) {
  std::string out = "step,reconstruction,kl,total\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& s = history[i];
    out += std::to_string(i) + "," + g17(s.reconstruction) + "," + g17(s.kl) + "," + g17(s.total) + "\n";
  }
  return out;
}

std::string metrics_csv(const std::vector<MetricRecord>& records) {
  std::string out = "model,dataset,seed";
  for (const auto& n : metric_names()) out += "," + n;
  out += "\n";
  for (const auto& r : records) {
    out += r.model + "," + r.dataset + "," + std::to_string(r.seed);
    for (const auto& n : metric_names()) out += "," + g17(metric_value(r, n));
    out += "\n";
  }
  return out;
}

std::vector<MetricRecord> parse_metrics_csv(const std::string& text) {
  std::vector<MetricRecord> out;
  std::size_t pos = 0, line_no = 0;
  const std::size_t n_fields = 3 + metric_names().size();
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> f;
    std::size_t s = 0;
    for (std::size_t c = line.find(','); ; c = line.find(',', s)) {
      f.push_back(line.substr(s, c == std::string::npos ? std::string::npos : c - s));
      if (c == std::string::npos) break;
      s = c + 1;
    }
    const std::string where = "metrics.csv line " + std::to_string(line_no);
    if (f.size() != n_fields) throw CorruptionError(where + ": expected " + std::to_string(n_fields) + " fields");
    MetricRecord r;
    r.model = f[0];
    r.dataset = f[1];
    auto num = [&](const std::string& t, auto& v) {
      const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
      if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw CorruptionError(where + ": bad number '" + t + "'");
    };
    num(f[2], r.seed);
    double* dst[] = {&r.r_xz, &r.loglik_interp, &r.loglik_recon, &r.kl_interp, &r.kl_recon};
    for (std::size_t m = 0; m < metric_names().size(); ++m) num(f[3 + m], *dst[m]);
    out.push_back(r);
  }
  return out;
}

std::string metrics_json(const std::vector<MetricRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    json o{{"model", r.model}, {"dataset", r.dataset}, {"seed", r.seed}};
    for (const auto& n : metric_names()) o[n] = metric_value(r, n);
    arr.push_back(o);
  }
  return arr.dump(2) + "\n";
}

std::string ols_csv(const OlsTable& table) {
  std::string out = "model";
  for (const auto& n : metric_names()) out += "," + n;
  out += "\n";
  for (const auto& m : table.models) {
    out += m;
    for (double v : table.rows.at(m)) out += "," + g17(v);
    out += "\n";
  }
  return out;
}

std::string ols_json(const OlsTable& table) {
  json o = json::object();
  for (const auto& m : table.models) {
    json row;
    for (std::size_t i = 0; i < metric_names().size(); ++i) row[metric_names()[i]] = table.rows.at(m)[i];
    o[m] = row;
  }
  return o.dump(2) + "\n";
}

}  // namespace gaia
