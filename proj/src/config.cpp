#include "gaia/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gaia/errors.hpp"

namespace gaia {

namespace pt = boost::property_tree;

const std::vector<std::string>& all_model_labels() {
  static const std::vector<std::string> labels{"ae", "vae", "gaia_a0", "gaia"};
  return labels;
}

ModelVariant model_variant_from_label(const std::string& label) {
  if (label == "ae") return {label, ModelKind::AE, false};
  if (label == "vae") return {label, ModelKind::VAE, false};
  if (label == "gaia") return {label, ModelKind::GAIA, true};
  if (label == "gaia_a0") return {label, ModelKind::GAIA, false};
  throw ConfigError("unknown model '" + label + "' (expected ae, vae, gaia_a0 or gaia)");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t') flush();
    else cur += c;
  }
  flush();
  return out;
}

DatasetKind ExperimentConfig::dataset_kind(DatasetTag tag) const {
  DatasetKind kind = DatasetKind::defaults(tag);
  if (noise >= 0.0) kind.noise = noise;
  kind.circle_factor = circle_factor;
  return kind;
}

TrainConfig ExperimentConfig::train_config(const ModelVariant& variant, std::uint64_t seed) const {
  TrainConfig tc = train;
  tc.model = variant.kind;
  tc.seed = seed;
  if (!variant.distance_loss) tc.alpha = 0.0;
  return tc;
}

std::vector<std::uint64_t> ExperimentConfig::seeds() const {
  std::vector<std::uint64_t> out;
  for (std::size_t r = 0; r < replicates; ++r) out.push_back(train.seed + r);
  return out;
}

void ExperimentConfig::validate() const {
  train.validate();
  arch.validate();
  if (n_train < train.batch) throw ConfigError("data.n_train must be >= train.batch");
  if (!(circle_factor > 0.0 && circle_factor < 1.0)) throw ConfigError("data.circle_factor must be in (0, 1)");
  if (eval.n_eval < 2) throw ConfigError("eval.n_eval must be >= 2");
  if (eval.n_reference <= eval.knn_k) throw ConfigError("eval.n_reference must exceed eval.knn_k");
  if (eval.knn_k < 1) throw ConfigError("eval.knn_k must be >= 1");
  if (eval.max_pairs < 2) throw ConfigError("eval.max_pairs must be >= 2");
  if (mesh_resolution < 2) throw ConfigError("eval.mesh_resolution must be >= 2");
  if (models.empty()) throw ConfigError("experiment.models must not be empty");
  if (datasets.empty()) throw ConfigError("experiment.datasets must not be empty");
  if (replicates < 1) throw ConfigError("experiment.replicates must be >= 1");
  for (const auto& m : models) model_variant_from_label(m);
  for (DatasetTag t : datasets) dataset_kind(t).validate();
}

namespace {

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  const std::string* raw(const std::string& section, const std::string& key) {
    seen_.insert(section + "." + key);
    const auto sec = tree_.find(section);
    if (sec == tree_.not_found()) return nullptr;
    const auto it = sec->second.find(key);
    if (it == sec->second.not_found()) return nullptr;
    return &it->second.data();
  }

  void real(const std::string& s, const std::string& k, double& out) {
    if (const auto* v = raw(s, k)) {
      double d = 0.0;
      const auto r = std::from_chars(v->data(), v->data() + v->size(), d);
      if (r.ec != std::errc() || r.ptr != v->data() + v->size() || !std::isfinite(d)) {
        throw ConfigError(s + "." + k + ": expected a finite number, got '" + *v + "'");
      }
      out = d;
    }
  }

  template <class T>
  void integer(const std::string& s, const std::string& k, T& out) {
    if (const auto* v = raw(s, k)) {
      unsigned long long u = 0;
      const auto r = std::from_chars(v->data(), v->data() + v->size(), u);
      if (r.ec != std::errc() || r.ptr != v->data() + v->size()) {
        throw ConfigError(s + "." + k + ": expected a non-negative integer, got '" + *v + "'");
      }
      out = static_cast<T>(u);
    }
  }

  template <class F>
  void text(const std::string& s, const std::string& k, F&& assign) {
    if (const auto* v = raw(s, k)) {
      try {
        assign(*v);
      } catch (const Error& e) {
        throw ConfigError(s + "." + k + ": " + e.what());
      }
    }
  }

  void reject_unknown() const {
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty()) {
        throw ConfigError(section + ": key outside of any section");
      }
      for (const auto& [key, value] : body) {
        (void)value;
        if (!seen_.count(section + "." + key)) throw ConfigError(section + "." + key + ": unknown key");
      }
    }
  }

 private:
  const pt::ptree& tree_;
  std::set<std::string> seen_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  ExperimentConfig c;
  Reader r(tree);
  r.real("train", "lr", c.train.lr);
  r.integer("train", "batch", c.train.batch);
  r.integer("train", "steps", c.train.steps);
  r.integer("train", "seed", c.train.seed);

  r.integer("model", "latent_dim", c.arch.latent_dim);
  r.integer("model", "hidden_width", c.arch.hidden_width);
  r.integer("model", "hidden_layers", c.arch.hidden_layers);
  r.text("model", "activation", [&](const std::string& v) { c.arch.hidden_activation = activation_from_string(v); });

  r.integer("data", "n_train", c.n_train);
  r.real("data", "noise", c.noise);
  r.real("data", "circle_factor", c.circle_factor);

  r.real("gaia", "sigmoid_slope", c.train.sigmoid_slope);
  r.real("gaia", "gamma", c.train.gamma);
  r.real("gaia", "alpha", c.train.alpha);
  r.real("gaia", "interp_mu", c.train.interp_mu);
  r.real("gaia", "interp_sigma", c.train.interp_sigma);
  r.text("gaia", "routing", [&](const std::string& v) { c.train.routing = balance_routing_from_string(v); });

  r.real("vae", "kl_weight", c.train.vae_kl_weight);
  r.real("vae", "recon_variance", c.train.vae_recon_variance);

  r.integer("eval", "n_eval", c.eval.n_eval);
  r.integer("eval", "n_reference", c.eval.n_reference);
  r.integer("eval", "knn_k", c.eval.knn_k);
  r.integer("eval", "max_pairs", c.eval.max_pairs);
  r.integer("eval", "mesh_resolution", c.mesh_resolution);

  r.text("experiment", "models", [&](const std::string& v) {
    c.models = split_list(v);
    for (const auto& m : c.models) model_variant_from_label(m);
  });
  r.text("experiment", "datasets", [&](const std::string& v) {
    c.datasets.clear();
    for (const auto& d : split_list(v)) c.datasets.push_back(dataset_tag_from_string(d));
  });
  r.integer("experiment", "replicates", c.replicates);

  r.reject_unknown();
  c.eval.interp_mu = c.train.interp_mu;
  c.eval.interp_sigma = c.train.interp_sigma;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_ini(const ExperimentConfig& c) {
  std::string models, datasets;
  for (const auto& m : c.models) models += (models.empty() ? "" : ",") + m;
  for (DatasetTag t : c.datasets) datasets += (datasets.empty() ? "" : ",") + to_string(t);

  std::ostringstream o;
  o << "[train]\n"
    << "lr = " << fmt(c.train.lr) << "\n"
    << "batch = " << c.train.batch << "\n"
    << "steps = " << c.train.steps << "\n"
    << "seed = " << c.train.seed << "\n\n"
    << "[model]\n"
    << "latent_dim = " << c.arch.latent_dim << "\n"
    << "hidden_width = " << c.arch.hidden_width << "\n"
    << "hidden_layers = " << c.arch.hidden_layers << "\n"
    << "activation = " << to_string(c.arch.hidden_activation) << "\n\n"
    << "[data]\n"
    << "n_train = " << c.n_train << "\n"
    << "noise = " << fmt(c.noise) << "\n"
    << "circle_factor = " << fmt(c.circle_factor) << "\n\n"
    << "[gaia]\n"
    << "sigmoid_slope = " << fmt(c.train.sigmoid_slope) << "\n"
    << "gamma = " << fmt(c.train.gamma) << "\n"
    << "alpha = " << fmt(c.train.alpha) << "\n"
    << "interp_mu = " << fmt(c.train.interp_mu) << "\n"
    << "interp_sigma = " << fmt(c.train.interp_sigma) << "\n"
    << "routing = " << to_string(c.train.routing) << "\n\n"
    << "[vae]\n"
    << "kl_weight = " << fmt(c.train.vae_kl_weight) << "\n"
    << "recon_variance = " << fmt(c.train.vae_recon_variance) << "\n\n"
    << "[eval]\n"
    << "n_eval = " << c.eval.n_eval << "\n"
    << "n_reference = " << c.eval.n_reference << "\n"
    << "knn_k = " << c.eval.knn_k << "\n"
    << "max_pairs = " << c.eval.max_pairs << "\n"
    << "mesh_resolution = " << c.mesh_resolution << "\n\n"
    << "[experiment]\n"
    << "models = " << models << "\n"
    << "datasets = " << datasets << "\n"
    << "replicates = " << c.replicates << "\n";
  return o.str();
}

}  // namespace gaia
