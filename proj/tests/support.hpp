#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "gaia/matrix.hpp"
#include "gaia/mlp.hpp"

namespace gaia::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = u(rng);
  return m;
}

inline Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double sd = 1.0) {
  std::normal_distribution<double> g(0.0, sd);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = g(rng);
  return m;
}

inline std::size_t random_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Random small MLP: 1-3 layers, widths 1-8, random hidden activation.
inline MlpNetwork random_network(std::mt19937_64& rng, std::size_t in, std::size_t out) {
  const std::size_t depth = random_size(rng, 1, 3);
  std::vector<std::size_t> widths{in};
  for (std::size_t l = 1; l < depth; ++l) widths.push_back(random_size(rng, 1, 8));
  widths.push_back(out);
  static const Activation acts[] = {Activation::Identity, Activation::ReLU, Activation::LeakyReLU,
                                    Activation::Tanh};
  const Activation hidden = acts[random_size(rng, 0, 3)];
  MlpNetwork net = MlpNetwork::random(widths, hidden, Activation::Identity, rng);
  // Non-zero biases.
  std::normal_distribution<double> g(0.0, 0.3);
  for (auto& layer : net.mutable_layers()) {
    for (double& b : layer.bias) b = g(rng);
  }
  return net;
}

inline std::vector<double> flatten(const NetworkGrads& g) {
  std::vector<double> out;
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    const auto w = g.weights[l].values();
    out.insert(out.end(), w.begin(), w.end());
    out.insert(out.end(), g.bias[l].begin(), g.bias[l].end());
  }
  return out;
}

inline double relative_error(double analytic, double numeric, double floor = 1e-8) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Central finite difference of f at parameter p of `flat`, shrinking h
/// (down to 1e-9) until two successive estimates agree (piecewise-linear losses have kinks
/// that a too-large step straddles).
inline double adaptive_central_difference(std::vector<double>& flat, std::size_t p,
                                          const std::function<double(const std::vector<double>&)>& f,
                                          double h0 = 1e-5) {
  const double orig = flat[p];
  auto estimate = [&](double h) {
    flat[p] = orig + h;
    const double up = f(flat);
    flat[p] = orig - h;
    const double down = f(flat);
    flat[p] = orig;
    return (up - down) / (2.0 * h);
  };
  // Agreement: relative 1e-6 plus absolute 1e-9.
  double h = h0;
  double prev = estimate(h);
  for (int i = 0; i < 4; ++i) {
    h *= 0.1;
    const double next = estimate(h);
    if (std::abs(next - prev) <= 1e-6 * std::max(std::abs(next), std::abs(prev)) + 1e-9) return next;
    prev = next;
  }
  return prev;
}

}  // namespace gaia::testing
