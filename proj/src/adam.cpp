#include "gaia/adam.hpp"

#include <cmath>

#include "gaia/errors.hpp"

namespace gaia {

AdamState::AdamState(const MlpNetwork& net, AdamConfig config)
    : config_(config), m_(net.zero_grads()), v_(net.zero_grads()) {}

void AdamState::restore(NetworkGrads m, NetworkGrads v, std::uint64_t step) {
  m_ = std::move(m);
  v_ = std::move(v);
  step_ = step;
}

namespace {

void update(std::span<double> param, std::span<const double> grad, std::span<double> m,
            std::span<double> v, const AdamConfig& c, double step_size, double bias2) {
  for (std::size_t i = 0; i < param.size(); ++i) {
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * grad[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * grad[i] * grad[i];
    const double v_hat = v[i] / bias2;
    param[i] -= step_size * m[i] / (std::sqrt(v_hat) + c.epsilon);
  }
}

}  // namespace

void adam_step(MlpNetwork& net, const NetworkGrads& grads, AdamState& state, double lr) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw Error("adam_step: learning rate must be >= 0");
  if (!grads.all_finite()) throw NumericError("adam_step: non-finite gradient");
  if (grads.weights.size() != net.depth() || state.m_.weights.size() != net.depth()) {
    throw DimensionError("adam_step: gradient/state depth does not match network");
  }
  ++state.step_;
  const auto& c = state.config_;
  const double t = static_cast<double>(state.step_);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);
  // m_hat = m / bias1 folded into the step size.
  const double step_size = lr / bias1;

  auto& layers = net.mutable_layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& layer = layers[l];
    require_same_shape(layer.weights, grads.weights[l], "adam_step weights");
    if (grads.bias[l].size() != layer.bias.size()) throw DimensionError("adam_step: bias shape");
    update(layer.weights.values(), grads.weights[l].values(), state.m_.weights[l].values(),
           state.v_.weights[l].values(), c, step_size, bias2);
    update(layer.bias, grads.bias[l], state.m_.bias[l], state.v_.bias[l], c, step_size, bias2);
  }
}

}  // namespace gaia
