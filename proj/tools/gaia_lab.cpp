// gaia_lab: experiment driver for the 2D GAIA / AE / VAE comparison.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "gaia/config.hpp"
#include "gaia/errors.hpp"
#include "gaia/experiment.hpp"
#include "gaia/hashing.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kDivergence = 3, kIo = 4 };

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string models;
  std::string datasets;
};

gaia::ExperimentConfig resolve_config(const Flags& f, bool prefer_run_dir) {
  namespace fs = std::filesystem;
  gaia::ExperimentConfig c;
  if (!f.config.empty()) {
    c = gaia::load_config(f.config);
  } else if (prefer_run_dir && fs::exists(fs::path(f.out) / "config.ini")) {
    c = gaia::load_run_config(f.out);
  }
  if (f.seed) c.train.seed = *f.seed;
  if (!f.models.empty()) {
    c.models = gaia::split_list(f.models);
    for (const auto& m : c.models) gaia::model_variant_from_label(m);
  }
  if (!f.datasets.empty()) {
    c.datasets.clear();
    for (const auto& d : gaia::split_list(f.datasets)) {
      try {
        c.datasets.push_back(gaia::dataset_tag_from_string(d));
      } catch (const gaia::Error& e) {
        throw gaia::ConfigError(std::string("--datasets: ") + e.what());
      }
    }
  }
  c.validate();
  return c;
}

void log_line(const std::string& s) { std::fprintf(stderr, "%s\n", s.c_str()); }

int cmd_generate(const Flags& f) {
  const auto c = resolve_config(f, false);
  for (gaia::DatasetTag tag : c.datasets) {
    const gaia::Matrix x = gaia::training_data(c, tag, c.train.seed).x;
    const std::string path =
        (std::filesystem::path(f.out) / "data" / (gaia::to_string(tag) + "_s" + std::to_string(c.train.seed) + ".csv"))
            .string();
    gaia::write_file(path, gaia::points_csv(x));
    log_line("wrote " + path);
  }
  return kOk;
}

int cmd_train(const Flags& f) {
  const auto c = resolve_config(f, false);
  gaia::RunOptions opt;
  opt.jobs = f.jobs;
  opt.log = log_line;
  const auto summary = gaia::run_experiment(c, f.out, opt);
  for (const auto& r : summary.records) {
    std::printf("%-8s %-10s seed %-4llu r_xz %.3f  loglik_interp %.1f  kl_interp %.3f\n", r.model.c_str(),
                r.dataset.c_str(), static_cast<unsigned long long>(r.seed), r.r_xz, r.loglik_interp, r.kl_interp);
  }
  if (summary.any_diverged()) {
    for (const auto& cell : summary.cells) {
      if (cell.diverged) std::fprintf(stderr, "%s: %s\n", cell.key.name().c_str(), cell.error.c_str());
    }
    return kDivergence;
  }
  return kOk;
}

int cmd_evaluate(const Flags& f) {
  const auto records = gaia::evaluate_run(resolve_config(f, true), f.out);
  std::fputs(gaia::metrics_csv(records).c_str(), stdout);
  return kOk;
}

int cmd_compare(const Flags& f) {
  std::fputs(gaia::ols_csv(gaia::compare_run(f.out)).c_str(), stdout);
  return kOk;
}

int cmd_plot(const Flags& f) {
  for (const auto& p : gaia::plot_run(resolve_config(f, true), f.out)) log_line("wrote " + p);
  return kOk;
}

int cmd_attr(const Flags& f) {
  gaia::attribute_vectors_run(resolve_config(f, true), f.out);
  log_line("wrote " + (std::filesystem::path(f.out) / "attr_vectors.csv").string());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GAIA 2D experiment lab"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  std::uint64_t seed = 0;
  app.add_option("--config", f.config, "INI experiment config");
  auto* seed_opt = app.add_option("--seed", seed, "base seed (overrides train.seed)");
  app.add_option("--jobs", f.jobs, "parallel grid cells")->check(CLI::PositiveNumber);
  app.add_option("--models", f.models, "comma list from ae,vae,gaia_a0,gaia");
  app.add_option("--datasets", f.datasets, "comma list from moons,circles,scurve,swissroll,blobs");
  app.add_option("--out", f.out, "output directory")->required();

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Flags&);
  };
  const Sub subs[] = {
      {"generate-data", "write the standardized training points as CSV", cmd_generate},
      {"train", "train the model x dataset grid, then evaluate, plot and compare", cmd_train},
      {"evaluate", "recompute metrics from checkpoints", cmd_evaluate},
      {"compare", "OLS aggregation of metrics.csv", cmd_compare},
      {"plot", "render figures from checkpoints", cmd_plot},
      {"attr-vectors", "latent attribute vectors from checkpoints", cmd_attr},
  };
  for (const auto& s : subs) app.add_subcommand(s.name, s.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  if (*seed_opt) f.seed = seed;

  try {
    for (const auto& s : subs) {
      if (app.got_subcommand(s.name)) return s.run(f);
    }
    return kFailure;
  } catch (const gaia::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const gaia::DivergenceError& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return kDivergence;
  } catch (const gaia::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
}
