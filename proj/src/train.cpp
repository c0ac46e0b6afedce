#include "gaia/train.hpp"

#include <cmath>

#include "gaia/errors.hpp"
#include "gaia/losses.hpp"

namespace gaia {

std::string to_string(BalanceRouting r) { return r == BalanceRouting::Own ? "own" : "crossed"; }

BalanceRouting balance_routing_from_string(const std::string& s) {
  if (s == "own") return BalanceRouting::Own;
  if (s == "crossed") return BalanceRouting::Crossed;
  throw ConfigError("unknown balance routing '" + s + "' (expected own|crossed)");
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("train.lr must be > 0");
  if (batch < 2) throw ConfigError("train.batch must be >= 2");
  if (!(sigmoid_slope > 0.0)) throw ConfigError("gaia.sigmoid_slope must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gaia.gamma must be in (0, 1]");
  if (!(alpha >= 0.0)) throw ConfigError("gaia.alpha must be >= 0");
  if (!(interp_sigma > 0.0)) throw ConfigError("gaia.interp_sigma must be > 0");
  if (!std::isfinite(interp_mu)) throw ConfigError("gaia.interp_mu must be finite");
  if (!(vae_kl_weight >= 0.0)) throw ConfigError("vae.kl_weight must be >= 0");
  if (!(vae_recon_variance > 0.0)) throw ConfigError("vae.recon_variance must be > 0");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream).
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

struct AeForward {
  Matrix latent;
  Matrix output;
  AutoencoderTapes tapes;
};

AeForward ae_forward(const Autoencoder& ae, const Matrix& x) {
  auto enc = forward(ae.encoder, x);
  auto dec = forward(ae.decoder, enc.output);
  return AeForward{std::move(enc.output), std::move(dec.output),
                   AutoencoderTapes{std::move(enc.tape), std::move(dec.tape)}};
}

struct AeBackward {
  AutoencoderGrads grads;
  Matrix input_grad;
};

AeBackward ae_backward(const Autoencoder& ae, const AutoencoderTapes& tapes, const Matrix& out_grad) {
  auto dec = backward(ae.decoder, tapes.decoder, out_grad);
  auto enc = backward(ae.encoder, tapes.encoder, dec.input_grad);
  return AeBackward{AutoencoderGrads{std::move(enc.grads), std::move(dec.grads)},
                    std::move(enc.input_grad)};
}

void accumulate(AutoencoderGrads& into, const AutoencoderGrads& g, double w) {
  AutoencoderGrads scaled = g;
  scaled.encoder *= w;
  scaled.decoder *= w;
  into.encoder += scaled.encoder;
  into.decoder += scaled.decoder;
}

void require_finite_loss(double v, const char* name) {
  if (!std::isfinite(v)) throw NumericError(std::string("non-finite loss ") + name);
}

}  // namespace

GaiaForward gaia_forward(const GaiaModel& model, const Matrix& x, std::vector<double> betas) {
  GaiaForward f;
  f.x = x;
  f.betas = std::move(betas);

  auto enc = forward(model.generator.encoder, x);
  f.z = std::move(enc.output);
  f.gen_encoder = std::move(enc.tape);
  f.z_int = interpolate(f.z, f.betas);

  auto dec_gen = forward(model.generator.decoder, f.z);
  f.x_gen = std::move(dec_gen.output);
  f.gen_decoder_gen = std::move(dec_gen.tape);
  auto dec_int = forward(model.generator.decoder, f.z_int);
  f.x_int = std::move(dec_int.output);
  f.gen_decoder_int = std::move(dec_int.tape);

  auto real = ae_forward(model.discriminator, x);
  f.x_rec = std::move(real.output);
  f.disc_real = std::move(real.tapes);
  auto gen = ae_forward(model.discriminator, f.x_gen);
  f.x_gen_rec = std::move(gen.output);
  f.disc_gen = std::move(gen.tapes);
  auto inter = ae_forward(model.discriminator, f.x_int);
  f.x_int_rec = std::move(inter.output);
  f.disc_int = std::move(inter.tapes);

  f.losses.l_x = pixel_loss(x, f.x_rec);
  f.losses.l_x_gen = pixel_loss(x, f.x_gen_rec);
  f.losses.l_x_int = pixel_loss(f.x_int, f.x_int_rec);
  f.losses.l_distance = distance_loss(x, f.z);
  return f;
}

GaiaGradients gaia_backward(const GaiaModel& model, const GaiaForward& f,
                            const GaiaLossWeights& w) {
  const Autoencoder& gen = model.generator;
  const Autoencoder& disc = model.discriminator;

  // Discriminator passes. Each backward yields both the discriminator's
  // parameter gradient and the gradient reaching its input.
  const auto real = ae_backward(disc, f.disc_real, pixel_loss_grad(f.x_rec, f.x));
  const auto through_gen = ae_backward(disc, f.disc_gen, pixel_loss_grad(f.x_gen_rec, f.x));
  const Matrix int_direct = pixel_loss_grad(f.x_int, f.x_int_rec);
  const auto through_int = ae_backward(disc, f.disc_int, -1.0 * int_direct);

  GaiaGradients out;
  out.discriminator = AutoencoderGrads{disc.encoder.zero_grads(), disc.decoder.zero_grads()};
  accumulate(out.discriminator, real.grads, w.disc_x);
  accumulate(out.discriminator, through_gen.grads, w.disc_x_gen);
  accumulate(out.discriminator, through_int.grads, w.disc_x_int);

  // Generator: x_gen feeds only the discriminator; x_int is both the target
  // and the discriminator input of its loss term.
  const Matrix d_x_gen = w.gen_x_gen * through_gen.input_grad;
  const Matrix d_x_int = w.gen_x_int * (int_direct + through_int.input_grad);

  auto dec_gen = backward(gen.decoder, f.gen_decoder_gen, d_x_gen);
  auto dec_int = backward(gen.decoder, f.gen_decoder_int, d_x_int);
  Matrix d_z = dec_gen.input_grad;
  d_z += interpolate_backward(dec_int.input_grad, f.betas);
  if (w.gen_distance != 0.0) d_z += w.gen_distance * distance_loss_grad(f.x, f.z);
  auto enc = backward(gen.encoder, f.gen_encoder, d_z);

  out.generator.encoder = std::move(enc.grads);
  out.generator.decoder = std::move(dec_gen.grads);
  out.generator.decoder += dec_int.grads;
  return out;
}

void compute_balance(StepLosses& s, double slope, double gamma) {
  const double fake = 0.5 * (s.l_x_gen + s.l_x_int);
  s.delta_disc = balance_sigmoid(s.l_x - fake, slope);
  s.delta_gen = 1.0 - s.delta_disc;
  s.w_gen_int = balance_sigmoid(s.l_x_int - s.l_x_gen, slope);
  s.w_gen_gen = 1.0 - s.w_gen_int;
  s.w_disc_fake = balance_sigmoid(fake * gamma - s.l_x, slope);
}

StepLosses gaia_step(GaiaModel& model, const DataBatch& batch, const TrainConfig& config,
                     std::mt19937_64& rng, GaiaOptimizers& opt) {
  const std::size_t b = batch.x.rows();
  if (b < 2) throw DimensionError("gaia_step: batch needs at least 2 rows");
  if (batch.x.cols() != model.generator.encoder.input_dim()) {
    throw DimensionError("gaia_step: batch width does not match model input");
  }
  auto betas = sample_betas(b, config.interp_mu, config.interp_sigma, rng);
  const GaiaForward f = gaia_forward(model, batch.x, std::move(betas));

  StepLosses s = f.losses;
  require_finite_loss(s.l_x, "L_x");
  require_finite_loss(s.l_x_gen, "L_x_gen");
  require_finite_loss(s.l_x_int, "L_x_int");
  require_finite_loss(s.l_distance, "L_distance");
  compute_balance(s, config.sigmoid_slope, config.gamma);

  GaiaLossWeights w;
  w.gen_x_gen = s.w_gen_gen;
  w.gen_x_int = s.w_gen_int;
  w.gen_distance = config.alpha;
  w.disc_x = 1.0;
  w.disc_x_gen = -0.5 * s.w_disc_fake;
  w.disc_x_int = -0.5 * s.w_disc_fake;
  const GaiaGradients g = gaia_backward(model, f, w);

  const bool own = config.routing == BalanceRouting::Own;
  const double gen_scale = own ? s.delta_gen : s.delta_disc;
  const double disc_scale = own ? s.delta_disc : s.delta_gen;
  adam_step(model.generator.encoder, g.generator.encoder, opt.generator.encoder,
            config.lr * gen_scale);
  adam_step(model.generator.decoder, g.generator.decoder, opt.generator.decoder,
            config.lr * gen_scale);
  adam_step(model.discriminator.encoder, g.discriminator.encoder, opt.discriminator.encoder,
            config.lr * disc_scale);
  adam_step(model.discriminator.decoder, g.discriminator.decoder, opt.discriminator.decoder,
            config.lr * disc_scale);
  return s;
}

BaselineLosses ae_step(Autoencoder& model, const DataBatch& batch, const TrainConfig& config,
                       AutoencoderOptimizer& opt) {
  const auto f = ae_forward(model, batch.x);
  BaselineLosses out;
  out.reconstruction = pixel_loss(f.output, batch.x);
  out.total = out.reconstruction;
  require_finite_loss(out.total, "reconstruction");
  const auto g = ae_backward(model, f.tapes, pixel_loss_grad(f.output, batch.x));
  adam_step(model.encoder, g.grads.encoder, opt.encoder, config.lr);
  adam_step(model.decoder, g.grads.decoder, opt.decoder, config.lr);
  return out;
}

BaselineLosses vae_step(VaeModel& model, const DataBatch& batch, const TrainConfig& config,
                        std::mt19937_64& rng, AutoencoderOptimizer& opt) {
  const Matrix& x = batch.x;
  const std::size_t b = x.rows();
  const std::size_t k = model.latent_dim();
  const double inv_b = 1.0 / static_cast<double>(b);

  auto enc = forward(model.encoder, x);
  auto [mu, log_var] = split_posterior(enc.output, k);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix eps(b, k);
  for (double& e : eps.values()) e = gauss(rng);
  Matrix z(b, k);
  Matrix sd(b, k);
  for (std::size_t i = 0; i < z.size(); ++i) {
    sd.values()[i] = std::exp(0.5 * log_var.values()[i]);
    z.values()[i] = mu.values()[i] + sd.values()[i] * eps.values()[i];
  }
  auto dec = forward(model.decoder, z);

  // Gaussian decoder with fixed variance, standard normal prior.
  const double var = config.vae_recon_variance;
  BaselineLosses out;
  Matrix d_out(b, x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = dec.output.values()[i] - x.values()[i];
    out.reconstruction += 0.5 * r * r / var;
    d_out.values()[i] = r / var * inv_b;
  }
  out.reconstruction *= inv_b;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double m = mu.values()[i], lv = log_var.values()[i];
    out.kl += -0.5 * (1.0 + lv - m * m - std::exp(lv));
  }
  out.kl *= inv_b;
  out.total = out.reconstruction + config.vae_kl_weight * out.kl;
  require_finite_loss(out.total, "ELBO");

  auto dec_b = backward(model.decoder, dec.tape, d_out);
  Matrix d_enc(b, 2 * k);
  const double w = config.vae_kl_weight;
  for (std::size_t r = 0; r < b; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      const double dz = dec_b.input_grad(r, c);
      const double lv = log_var(r, c);
      d_enc(r, c) = dz + w * mu(r, c) * inv_b;
      d_enc(r, k + c) = dz * eps(r, c) * 0.5 * sd(r, c) + w * 0.5 * (std::exp(lv) - 1.0) * inv_b;
    }
  }
  auto enc_b = backward(model.encoder, enc.tape, d_enc);
  adam_step(model.encoder, enc_b.grads, opt.encoder, config.lr);
  adam_step(model.decoder, dec_b.grads, opt.decoder, config.lr);
  return out;
}

TrainResult train(const DataBatch& data, const TrainConfig& config, const ArchitectureConfig& arch,
                  const StepCallback& on_step) {
  config.validate();
  TrainResult result{build(config.model, arch, derive_seed(config.seed, 1)), {}, {}, {}, 0};
  MinibatchStream stream(data, config.batch, derive_seed(config.seed, 2));
  std::mt19937_64 noise(derive_seed(config.seed, 3));

  std::visit(
      [&](auto& model) {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, GaiaModel>) {
          GaiaOptimizers opt(model, config.adam);
          result.gaia_history.reserve(config.steps);
          for (std::size_t step = 0; step < config.steps; ++step) {
            const DataBatch batch = stream.next();
            try {
              result.gaia_history.push_back(gaia_step(model, batch, config, noise, opt));
            } catch (const NumericError& e) {
              throw DivergenceError(step, e.what());
            }
            result.steps_done = step + 1;
            if (on_step) on_step(step);
          }
          result.optimizer_states = {opt.generator.encoder, opt.generator.decoder,
                                     opt.discriminator.encoder, opt.discriminator.decoder};
        } else {
          AutoencoderOptimizer opt;
          opt.encoder = AdamState(model.encoder, config.adam);
          opt.decoder = AdamState(model.decoder, config.adam);
          result.baseline_history.reserve(config.steps);
          for (std::size_t step = 0; step < config.steps; ++step) {
            const DataBatch batch = stream.next();
            try {
              if constexpr (std::is_same_v<T, Autoencoder>) {
                result.baseline_history.push_back(ae_step(model, batch, config, opt));
              } else {
                result.baseline_history.push_back(vae_step(model, batch, config, noise, opt));
              }
            } catch (const NumericError& e) {
              throw DivergenceError(step, e.what());
            }
            result.steps_done = step + 1;
            if (on_step) on_step(step);
          }
          result.optimizer_states = {opt.encoder, opt.decoder};
        }
      },
      result.model);
  return result;
}

}  // namespace gaia
