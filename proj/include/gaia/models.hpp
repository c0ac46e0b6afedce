#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>

#include "gaia/matrix.hpp"
#include "gaia/mlp.hpp"

namespace gaia {

enum class ModelKind { AE, VAE, GAIA };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct ArchitectureConfig {
  std::size_t data_dim = 2;
  std::size_t latent_dim = 2;
  std::size_t hidden_width = 256;
  std::size_t hidden_layers = 6;  // per encoder and per decoder
  Activation hidden_activation = Activation::LeakyReLU;

  void validate() const;
  std::vector<std::size_t> encoder_widths(std::size_t out_dim) const;
  std::vector<std::size_t> decoder_widths() const;
};

struct Autoencoder {
  MlpNetwork encoder;
  MlpNetwork decoder;

  std::size_t latent_dim() const { return encoder.output_dim(); }
  std::size_t parameter_count() const {
    return encoder.parameter_count() + decoder.parameter_count();
  }
};

/// Encoder emits [mu | log variance] side by side: 2 * latent_dim columns.
struct VaeModel {
  MlpNetwork encoder;
  MlpNetwork decoder;

  std::size_t latent_dim() const { return decoder.input_dim(); }
};

struct GaiaModel {
  Autoencoder generator;
  Autoencoder discriminator;
};

Autoencoder build_autoencoder(const ArchitectureConfig& arch, std::uint64_t seed);
VaeModel build_vae(const ArchitectureConfig& arch, std::uint64_t seed);
GaiaModel build_gaia(const ArchitectureConfig& arch, std::uint64_t seed);

using AnyModel = std::variant<Autoencoder, VaeModel, GaiaModel>;
AnyModel build(ModelKind kind, const ArchitectureConfig& arch, std::uint64_t seed);
ModelKind kind_of(const AnyModel& model);

// Deterministic encode/decode. For a VAE, encode returns the posterior mean;
// for GAIA the generator is used.
Matrix encode(const AnyModel& model, const Matrix& x);
Matrix decode(const AnyModel& model, const Matrix& z);
Matrix reconstruct(const AnyModel& model, const Matrix& x);

Matrix encode(const Autoencoder& ae, const Matrix& x);
Matrix decode(const Autoencoder& ae, const Matrix& z);
Matrix reconstruct(const Autoencoder& ae, const Matrix& x);

struct VaeSample {
  Matrix z;
  Matrix mu;
  Matrix log_var;
  Matrix epsilon;
};

/// Splits encoder output into (mu, log variance).
std::pair<Matrix, Matrix> split_posterior(const Matrix& encoded, std::size_t latent_dim);

/// Reparameterized draw z = mu + exp(log_var / 2) * eps, eps ~ N(0, I).
VaeSample vae_sample(const VaeModel& model, const Matrix& x, std::mt19937_64& rng);

}  // namespace gaia
