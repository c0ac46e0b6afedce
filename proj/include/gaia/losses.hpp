#pragma once

#include <random>
#include <span>
#include <vector>

#include "gaia/matrix.hpp"

namespace gaia {

/// Mean absolute elementwise difference.
double pixel_loss(const Matrix& a, const Matrix& b);
/// d pixel_loss(a, b) / da. Uses sign(0) = 0.
Matrix pixel_loss_grad(const Matrix& a, const Matrix& b);

/// Pairwise-distance structure loss between a batch in data space and its
/// latent codes:
///   (1/B) sum_{i,j} [log2(1 + dx_ij^2 / mean dx^2) - log2(1 + dz_ij^2 / mean dz^2)]^2
/// over all ordered pairs, means taken over all B^2 ordered pairs.
double distance_loss(const Matrix& x, const Matrix& z);
/// Gradient of distance_loss with respect to z (x is data, held fixed).
Matrix distance_loss_grad(const Matrix& x, const Matrix& z);

/// 1 / (1 + exp(-d * slope)), clamped to the open interval (0, 1).
double balance_sigmoid(double d, double slope);

/// Row i of an interpolated batch mixes z_i with its partner row (i + 1) mod B.
inline std::size_t interpolation_partner(std::size_t i, std::size_t batch) {
  return (i + 1) % batch;
}

std::vector<double> sample_betas(std::size_t count, double mu, double sigma, std::mt19937_64& rng);

/// z_int_i = z_i * beta_i + z_partner(i) * (1 - beta_i).
Matrix interpolate(const Matrix& z, std::span<const double> betas);
/// Pulls a gradient on the interpolants back onto z.
Matrix interpolate_backward(const Matrix& grad_int, std::span<const double> betas);

/// Draws betas ~ N(mu, sigma^2) and interpolates.
Matrix sample_interpolations(const Matrix& z, std::mt19937_64& rng, double mu = 0.5,
                             double sigma = 0.25);

}  // namespace gaia
