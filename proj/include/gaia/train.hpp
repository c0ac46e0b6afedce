#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gaia/adam.hpp"
#include "gaia/datasets.hpp"
#include "gaia/models.hpp"

namespace gaia {

/// Own: discriminator lr x delta_disc, generator lr x delta_gen.
/// Crossed: generator lr x delta_disc, discriminator lr x delta_gen.
enum class BalanceRouting { Own, Crossed };

std::string to_string(BalanceRouting r);
BalanceRouting balance_routing_from_string(const std::string& s);

struct TrainConfig {
  ModelKind model = ModelKind::GAIA;
  double lr = 1e-4;
  std::size_t batch = 64;
  std::size_t steps = 50000;
  double sigmoid_slope = 20.0;  // b
  double gamma = 0.5;
  double alpha = 1.0;           // distance-loss weight
  double interp_mu = 0.5;
  double interp_sigma = 0.25;
  std::uint64_t seed = 0;
  // Which balance factor scales which network's learning rate.
  BalanceRouting routing = BalanceRouting::Own;
  double vae_kl_weight = 1.0;
  double vae_recon_variance = 0.01;  // fixed Gaussian decoder variance
  AdamConfig adam;

  void validate() const;
};

/// Everything logged for one GAIA iteration.
struct StepLosses {
  double l_x = 0.0;
  double l_x_gen = 0.0;
  double l_x_int = 0.0;
  double l_distance = 0.0;
  double delta_disc = 0.5;
  double delta_gen = 0.5;
  double w_gen_int = 0.5;
  double w_gen_gen = 0.5;
  double w_disc_fake = 0.5;
};

/// Loss record for the AE / VAE baselines. kl is 0 for the plain AE.
struct BaselineLosses {
  double reconstruction = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

struct AutoencoderTapes {
  Tape encoder;
  Tape decoder;
};

struct AutoencoderGrads {
  NetworkGrads encoder;
  NetworkGrads decoder;
};

struct AutoencoderOptimizer {
  AdamState encoder;
  AdamState decoder;

  AutoencoderOptimizer() = default;
  AutoencoderOptimizer(const Autoencoder& ae, const AdamConfig& cfg)
      : encoder(ae.encoder, cfg), decoder(ae.decoder, cfg) {}
};

struct GaiaOptimizers {
  AutoencoderOptimizer generator;
  AutoencoderOptimizer discriminator;

  GaiaOptimizers() = default;
  GaiaOptimizers(const GaiaModel& m, const AdamConfig& cfg)
      : generator(m.generator, cfg), discriminator(m.discriminator, cfg) {}
};

/// All activations of one pass through the GAIA graph.
struct GaiaForward {
  Matrix x, z, z_int, x_gen, x_int;
  Matrix x_rec, x_gen_rec, x_int_rec;  // discriminator outputs
  std::vector<double> betas;
  Tape gen_encoder;
  Tape gen_decoder_gen;
  Tape gen_decoder_int;
  AutoencoderTapes disc_real, disc_gen, disc_int;
  StepLosses losses;  // raw losses only; balance fields untouched
};

/// Coefficients applied to each loss term when forming the two objectives.
struct GaiaLossWeights {
  double gen_x_gen = 0.0;
  double gen_x_int = 0.0;
  double gen_distance = 0.0;
  double disc_x = 0.0;
  double disc_x_gen = 0.0;
  double disc_x_int = 0.0;
};

struct GaiaGradients {
  AutoencoderGrads generator;
  AutoencoderGrads discriminator;
};

GaiaForward gaia_forward(const GaiaModel& model, const Matrix& x, std::vector<double> betas);
/// Parameter gradients of
///   sum of gen_* weights x terms   wrt the generator, and
///   sum of disc_* weights x terms  wrt the discriminator.
GaiaGradients gaia_backward(const GaiaModel& model, const GaiaForward& fwd,
                            const GaiaLossWeights& weights);

/// Fills the five balance weights of `losses` from its raw loss fields.
void compute_balance(StepLosses& losses, double slope, double gamma);

/// One full iteration of the GAIA update: forward, balance, backward, two Adam steps.
StepLosses gaia_step(GaiaModel& model, const DataBatch& batch, const TrainConfig& config,
                     std::mt19937_64& rng, GaiaOptimizers& optimizers);

BaselineLosses ae_step(Autoencoder& model, const DataBatch& batch, const TrainConfig& config,
                       AutoencoderOptimizer& optimizer);
BaselineLosses vae_step(VaeModel& model, const DataBatch& batch, const TrainConfig& config,
                        std::mt19937_64& rng, AutoencoderOptimizer& optimizer);

struct TrainResult {
  AnyModel model;
  std::vector<StepLosses> gaia_history;
  std::vector<BaselineLosses> baseline_history;
  std::vector<AdamState> optimizer_states;  // encoder, decoder[, disc encoder, disc decoder]
  std::size_t steps_done = 0;
};

using StepCallback = std::function<void(std::size_t step)>;

/// Runs config.steps iterations from a fresh seeded model. Throws
/// DivergenceError on a non-finite loss.
TrainResult train(const DataBatch& data, const TrainConfig& config,
                  const ArchitectureConfig& arch, const StepCallback& on_step = {});

/// Independent seed streams derived from the run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace gaia
