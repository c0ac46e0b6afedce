#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gaia/matrix.hpp"

namespace gaia {

enum class Activation { Identity, ReLU, LeakyReLU, Tanh };

inline constexpr double kLeakySlope = 0.2;

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

double activate(Activation a, double x);
// Derivative with respect to the pre-activation value.
double activate_derivative(Activation a, double pre);

struct DenseLayer {
  Matrix weights;             // in_dim x out_dim
  std::vector<double> bias;   // out_dim
  Activation activation = Activation::Identity;

  std::size_t in_dim() const noexcept { return weights.rows(); }
  std::size_t out_dim() const noexcept { return weights.cols(); }
};

/// Gradients shaped like an MlpNetwork's parameters. Also used for Adam moments.
struct NetworkGrads {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> bias;

  NetworkGrads& operator+=(const NetworkGrads& other);
  NetworkGrads& operator*=(double s);
  bool all_finite() const noexcept;
  double max_abs() const noexcept;
};

class MlpNetwork;

/// Everything backward() needs from one forward pass.
struct Tape {
  std::uint64_t network_id = 0;
  std::uint64_t network_version = 0;
  std::vector<Matrix> inputs;  // input to layer l
  std::vector<Matrix> pre;     // pre-activation of layer l
};

class MlpNetwork {
 public:
  MlpNetwork();
  explicit MlpNetwork(std::vector<DenseLayer> layers);
  MlpNetwork(const MlpNetwork& other);
  MlpNetwork& operator=(const MlpNetwork& other);
  MlpNetwork(MlpNetwork&&) noexcept = default;
  MlpNetwork& operator=(MlpNetwork&&) noexcept = default;

  /// Layer widths [in, hidden..., out] with `hidden` activation on every
  /// hidden layer and `output` on the last. He-style uniform init from `rng`.
  static MlpNetwork random(std::span<const std::size_t> widths, Activation hidden,
                           Activation output, std::mt19937_64& rng);

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  std::size_t depth() const noexcept { return layers_.size(); }
  std::size_t parameter_count() const noexcept;
  std::vector<std::size_t> widths() const;

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  // Mutable access bumps the version, which invalidates outstanding tapes.
  std::vector<DenseLayer>& mutable_layers();

  std::uint64_t id() const noexcept { return id_; }
  std::uint64_t version() const noexcept { return version_; }

  NetworkGrads zero_grads() const;

  // Flat parameter views (layer order, weights then bias).
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

 private:
  void validate() const;

  std::vector<DenseLayer> layers_;
  std::uint64_t id_;
  std::uint64_t version_ = 0;
};

struct ForwardResult {
  Matrix output;
  Tape tape;
};

struct BackwardResult {
  NetworkGrads grads;
  Matrix input_grad;
};

ForwardResult forward(const MlpNetwork& net, const Matrix& x);
// Output only; skips the tape.
Matrix evaluate(const MlpNetwork& net, const Matrix& x);
BackwardResult backward(const MlpNetwork& net, const Tape& tape, const Matrix& output_grad);

}  // namespace gaia
