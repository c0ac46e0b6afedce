#include "gaia/evaluate.hpp"

#include <random>

#include "gaia/losses.hpp"
#include "gaia/train.hpp"

namespace gaia {

EvalSets make_eval_sets(const DatasetKind& kind, const Standardizer& standardizer,
                        const EvalConfig& config, std::uint64_t seed) {
  EvalSets sets;
  sets.eval = standardizer.apply(generate_raw(kind, config.n_eval, derive_seed(seed, 101)));
  sets.reference = standardizer.apply(generate_raw(kind, config.n_reference, derive_seed(seed, 102)));
  return sets;
}

Matrix interpolation_outputs(const AnyModel& model, const Matrix& x, const EvalConfig& config,
                             std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed(seed, 103));
  const Matrix z = encode(model, x);
  return decode(model, sample_interpolations(z, rng, config.interp_mu, config.interp_sigma));
}

MetricRecord evaluate_model(const AnyModel& model, const std::string& label,
                            const std::string& dataset, const EvalSets& sets,
                            const EvalConfig& config, std::uint64_t seed) {
  MetricRecord rec;
  rec.model = label;
  rec.dataset = dataset;
  rec.seed = seed;

  const Matrix z = encode(model, sets.eval);
  rec.r_xz = pairwise_distance_correlation(sets.eval, z, config.max_pairs, derive_seed(seed, 104));

  const Matrix x_int = interpolation_outputs(model, sets.eval, config, seed);
  const Matrix x_rec = decode(model, z);
  const KdeModel kde = kde_fit(sets.reference);
  rec.loglik_interp = kde_loglik(kde, x_int);
  rec.loglik_recon = kde_loglik(kde, x_rec);
  rec.kl_interp = kl_divergence(sets.reference, x_int, config.knn_k);
  rec.kl_recon = kl_divergence(sets.reference, x_rec, config.knn_k);
  return rec;
}

}  // namespace gaia
