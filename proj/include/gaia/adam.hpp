#pragma once

#include <cstdint>

#include "gaia/mlp.hpp"

namespace gaia {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamState {
 public:
  AdamState() = default;
  AdamState(const MlpNetwork& net, AdamConfig config = {});

  const AdamConfig& config() const noexcept { return config_; }
  std::uint64_t step() const noexcept { return step_; }
  const NetworkGrads& first_moment() const noexcept { return m_; }
  const NetworkGrads& second_moment() const noexcept { return v_; }

  // For checkpoint restore.
  void restore(NetworkGrads m, NetworkGrads v, std::uint64_t step);

 private:
  friend void adam_step(MlpNetwork&, const NetworkGrads&, AdamState&, double);

  AdamConfig config_;
  NetworkGrads m_;
  NetworkGrads v_;
  std::uint64_t step_ = 0;
};

/// One bias-corrected Adam update. lr may be 0 (a no-op on parameters that
/// still advances the moments and step counter).
void adam_step(MlpNetwork& net, const NetworkGrads& grads, AdamState& state, double lr);

}  // namespace gaia
