#include "gaia/models.hpp"

#include <cmath>

#include "gaia/errors.hpp"

namespace gaia {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::AE: return "ae";
    case ModelKind::VAE: return "vae";
    case ModelKind::GAIA: return "gaia";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "ae") return ModelKind::AE;
  if (s == "vae") return ModelKind::VAE;
  if (s == "gaia") return ModelKind::GAIA;
  throw ConfigError("unknown model kind '" + s + "'");
}

void ArchitectureConfig::validate() const {
  if (data_dim == 0) throw ConfigError("data_dim must be >= 1");
  if (latent_dim == 0) throw ConfigError("latent_dim must be >= 1");
  if (hidden_width == 0) throw ConfigError("hidden_width must be >= 1");
}

std::vector<std::size_t> ArchitectureConfig::encoder_widths(std::size_t out_dim) const {
  std::vector<std::size_t> w{data_dim};
  for (std::size_t i = 0; i < hidden_layers; ++i) w.push_back(hidden_width);
  w.push_back(out_dim);
  return w;
}

std::vector<std::size_t> ArchitectureConfig::decoder_widths() const {
  std::vector<std::size_t> w{latent_dim};
  for (std::size_t i = 0; i < hidden_layers; ++i) w.push_back(hidden_width);
  w.push_back(data_dim);
  return w;
}

namespace {

Autoencoder build_ae_from(const ArchitectureConfig& arch, std::mt19937_64& rng) {
  const auto ew = arch.encoder_widths(arch.latent_dim);
  const auto dw = arch.decoder_widths();
  Autoencoder ae{MlpNetwork::random(ew, arch.hidden_activation, Activation::Identity, rng),
                 MlpNetwork::random(dw, arch.hidden_activation, Activation::Identity, rng)};
  return ae;
}

}  // namespace

Autoencoder build_autoencoder(const ArchitectureConfig& arch, std::uint64_t seed) {
  arch.validate();
  std::mt19937_64 rng(seed);
  return build_ae_from(arch, rng);
}

VaeModel build_vae(const ArchitectureConfig& arch, std::uint64_t seed) {
  arch.validate();
  std::mt19937_64 rng(seed);
  const auto ew = arch.encoder_widths(2 * arch.latent_dim);
  const auto dw = arch.decoder_widths();
  VaeModel vae{MlpNetwork::random(ew, arch.hidden_activation, Activation::Identity, rng),
               MlpNetwork::random(dw, arch.hidden_activation, Activation::Identity, rng)};
  return vae;
}

GaiaModel build_gaia(const ArchitectureConfig& arch, std::uint64_t seed) {
  arch.validate();
  std::mt19937_64 rng(seed);
  Autoencoder g = build_ae_from(arch, rng);
  Autoencoder d = build_ae_from(arch, rng);
  return GaiaModel{std::move(g), std::move(d)};
}

AnyModel build(ModelKind kind, const ArchitectureConfig& arch, std::uint64_t seed) {
  switch (kind) {
    case ModelKind::AE: return build_autoencoder(arch, seed);
    case ModelKind::VAE: return build_vae(arch, seed);
    case ModelKind::GAIA: return build_gaia(arch, seed);
  }
  throw ConfigError("unknown model kind");
}

ModelKind kind_of(const AnyModel& model) {
  switch (model.index()) {
    case 0: return ModelKind::AE;
    case 1: return ModelKind::VAE;
    default: return ModelKind::GAIA;
  }
}

Matrix encode(const Autoencoder& ae, const Matrix& x) { return evaluate(ae.encoder, x); }
Matrix decode(const Autoencoder& ae, const Matrix& z) { return evaluate(ae.decoder, z); }
Matrix reconstruct(const Autoencoder& ae, const Matrix& x) { return decode(ae, encode(ae, x)); }

std::pair<Matrix, Matrix> split_posterior(const Matrix& encoded, std::size_t latent_dim) {
  if (encoded.cols() != 2 * latent_dim) throw DimensionError("VAE encoder output width");
  return {encoded.slice_cols(0, latent_dim), encoded.slice_cols(latent_dim, latent_dim)};
}

Matrix encode(const AnyModel& model, const Matrix& x) {
  return std::visit(
      [&](const auto& m) -> Matrix {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Autoencoder>) {
          return encode(m, x);
        } else if constexpr (std::is_same_v<T, VaeModel>) {
          return split_posterior(evaluate(m.encoder, x), m.latent_dim()).first;
        } else {
          return encode(m.generator, x);
        }
      },
      model);
}

Matrix decode(const AnyModel& model, const Matrix& z) {
  return std::visit(
      [&](const auto& m) -> Matrix {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaiaModel>) {
          return decode(m.generator, z);
        } else {
          return evaluate(m.decoder, z);
        }
      },
      model);
}

Matrix reconstruct(const AnyModel& model, const Matrix& x) { return decode(model, encode(model, x)); }

VaeSample vae_sample(const VaeModel& model, const Matrix& x, std::mt19937_64& rng) {
  const Matrix encoded = evaluate(model.encoder, x);
  if (!encoded.all_finite()) throw NumericError("vae_sample: non-finite encoder output");
  auto [mu, log_var] = split_posterior(encoded, model.latent_dim());
  std::normal_distribution<double> gauss(0.0, 1.0);
  VaeSample s;
  s.epsilon = Matrix(mu.rows(), mu.cols());
  for (double& e : s.epsilon.values()) e = gauss(rng);
  s.z = Matrix(mu.rows(), mu.cols());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    s.z.values()[i] = mu.values()[i] + std::exp(0.5 * log_var.values()[i]) * s.epsilon.values()[i];
  }
  s.mu = std::move(mu);
  s.log_var = std::move(log_var);
  return s;
}

}  // namespace gaia
