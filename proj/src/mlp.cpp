#include "gaia/mlp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "gaia/errors.hpp"
#include "gaia/kernels.hpp"

namespace gaia {

namespace {

std::uint64_t next_network_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

void apply_activation(Activation a, std::span<const double> pre, std::span<double> out) {
  switch (a) {
    case Activation::Identity:
      std::copy(pre.begin(), pre.end(), out.begin());
      break;
    case Activation::ReLU:
      for (std::size_t i = 0; i < pre.size(); ++i) out[i] = pre[i] > 0.0 ? pre[i] : 0.0;
      break;
    case Activation::LeakyReLU:
      for (std::size_t i = 0; i < pre.size(); ++i) out[i] = pre[i] > 0.0 ? pre[i] : kLeakySlope * pre[i];
      break;
    case Activation::Tanh:
      for (std::size_t i = 0; i < pre.size(); ++i) out[i] = std::tanh(pre[i]);
      break;
  }
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::ReLU: return "relu";
    case Activation::LeakyReLU: return "leaky_relu";
    case Activation::Tanh: return "tanh";
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::Identity;
  if (s == "relu") return Activation::ReLU;
  if (s == "leaky_relu") return Activation::LeakyReLU;
  if (s == "tanh") return Activation::Tanh;
  throw Error("unknown activation '" + s + "'");
}

double activate(Activation a, double x) {
  switch (a) {
    case Activation::Identity: return x;
    case Activation::ReLU: return x > 0.0 ? x : 0.0;
    case Activation::LeakyReLU: return x > 0.0 ? x : kLeakySlope * x;
    case Activation::Tanh: return std::tanh(x);
  }
  return x;
}

double activate_derivative(Activation a, double pre) {
  switch (a) {
    case Activation::Identity: return 1.0;
    case Activation::ReLU: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::LeakyReLU: return pre > 0.0 ? 1.0 : kLeakySlope;
    case Activation::Tanh: {
      const double t = std::tanh(pre);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

NetworkGrads& NetworkGrads::operator+=(const NetworkGrads& other) {
  if (weights.size() != other.weights.size()) throw DimensionError("gradient depth mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    for (std::size_t j = 0; j < bias[l].size(); ++j) bias[l][j] += other.bias[l][j];
  }
  return *this;
}

NetworkGrads& NetworkGrads::operator*=(double s) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] *= s;
    for (double& b : bias[l]) b *= s;
  }
  return *this;
}

bool NetworkGrads::all_finite() const noexcept {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (!weights[l].all_finite()) return false;
    for (double b : bias[l]) {
      if (!std::isfinite(b)) return false;
    }
  }
  return true;
}

double NetworkGrads::max_abs() const noexcept {
  double m = 0.0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (double w : weights[l].values()) m = std::max(m, std::abs(w));
    for (double b : bias[l]) m = std::max(m, std::abs(b));
  }
  return m;
}

MlpNetwork::MlpNetwork() : id_(next_network_id()) {}

MlpNetwork::MlpNetwork(std::vector<DenseLayer> layers)
    : layers_(std::move(layers)), id_(next_network_id()) {
  validate();
}

MlpNetwork::MlpNetwork(const MlpNetwork& other)
    : layers_(other.layers_), id_(next_network_id()), version_(0) {}

MlpNetwork& MlpNetwork::operator=(const MlpNetwork& other) {
  if (this != &other) {
    layers_ = other.layers_;
    ++version_;
  }
  return *this;
}

void MlpNetwork::validate() const {
  if (layers_.empty()) throw DimensionError("network has no layers");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.in_dim() == 0 || layer.out_dim() == 0) throw DimensionError("empty layer");
    if (layer.bias.size() != layer.out_dim()) {
      throw DimensionError("layer " + std::to_string(l) + ": bias length != out_dim");
    }
    if (l > 0 && layers_[l - 1].out_dim() != layer.in_dim()) {
      throw DimensionError("layer " + std::to_string(l) + ": input width does not chain");
    }
  }
}

MlpNetwork MlpNetwork::random(std::span<const std::size_t> widths, Activation hidden,
                              Activation output, std::mt19937_64& rng) {
  if (widths.size() < 2) throw DimensionError("network needs at least input and output widths");
  std::vector<DenseLayer> layers;
  layers.reserve(widths.size() - 1);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t fan_in = widths[l];
    const std::size_t fan_out = widths[l + 1];
    if (fan_in == 0 || fan_out == 0) throw DimensionError("zero layer width");
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    DenseLayer layer;
    layer.weights = Matrix(fan_in, fan_out);
    for (double& w : layer.weights.values()) w = dist(rng);
    layer.bias.assign(fan_out, 0.0);
    layer.activation = (l + 2 == widths.size()) ? output : hidden;
    layers.push_back(std::move(layer));
  }
  return MlpNetwork(std::move(layers));
}

std::size_t MlpNetwork::input_dim() const {
  return layers_.empty() ? 0 : layers_.front().in_dim();
}

std::size_t MlpNetwork::output_dim() const {
  return layers_.empty() ? 0 : layers_.back().out_dim();
}

std::size_t MlpNetwork::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
  return n;
}

std::vector<std::size_t> MlpNetwork::widths() const {
  std::vector<std::size_t> w;
  if (layers_.empty()) return w;
  w.push_back(layers_.front().in_dim());
  for (const auto& layer : layers_) w.push_back(layer.out_dim());
  return w;
}

std::vector<DenseLayer>& MlpNetwork::mutable_layers() {
  ++version_;
  return layers_;
}

NetworkGrads MlpNetwork::zero_grads() const {
  NetworkGrads g;
  for (const auto& layer : layers_) {
    g.weights.emplace_back(layer.in_dim(), layer.out_dim());
    g.bias.emplace_back(layer.out_dim(), 0.0);
  }
  return g;
}

std::vector<double> MlpNetwork::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const auto& layer : layers_) {
    flat.insert(flat.end(), layer.weights.values().begin(), layer.weights.values().end());
    flat.insert(flat.end(), layer.bias.begin(), layer.bias.end());
  }
  return flat;
}

void MlpNetwork::assign(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw DimensionError("parameter payload has " + std::to_string(flat.size()) +
                         " values, network expects " + std::to_string(parameter_count()));
  }
  ++version_;
  std::size_t pos = 0;
  for (auto& layer : layers_) {
    auto w = layer.weights.values();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), w.size(), w.begin());
    pos += w.size();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), layer.bias.size(),
                layer.bias.begin());
    pos += layer.bias.size();
  }
}

namespace {

void add_bias(Matrix& m, const std::vector<double>& bias) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias[c];
  }
}

void check_input(const MlpNetwork& net, const Matrix& x) {
  if (x.cols() != net.input_dim()) {
    throw DimensionError("network expects " + std::to_string(net.input_dim()) +
                         " input columns, got " + shape_string(x));
  }
  require_finite(x, "network input");
}

}  // namespace

ForwardResult forward(const MlpNetwork& net, const Matrix& x) {
  check_input(net, x);
  ForwardResult result;
  result.tape.network_id = net.id();
  result.tape.network_version = net.version();
  result.tape.inputs.reserve(net.depth());
  result.tape.pre.reserve(net.depth());

  Matrix current = x;
  for (const auto& layer : net.layers()) {
    Matrix pre;
    kernels::gemm_nn(current, layer.weights, pre);
    add_bias(pre, layer.bias);
    Matrix out(pre.rows(), pre.cols());
    apply_activation(layer.activation, pre.values(), out.values());
    result.tape.inputs.push_back(std::move(current));
    result.tape.pre.push_back(std::move(pre));
    current = std::move(out);
  }
  result.output = std::move(current);
  return result;
}

Matrix evaluate(const MlpNetwork& net, const Matrix& x) {
  check_input(net, x);
  Matrix current = x;
  Matrix pre;
  for (const auto& layer : net.layers()) {
    kernels::gemm_nn(current, layer.weights, pre);
    add_bias(pre, layer.bias);
    current = Matrix(pre.rows(), pre.cols());
    apply_activation(layer.activation, pre.values(), current.values());
  }
  return current;
}

BackwardResult backward(const MlpNetwork& net, const Tape& tape, const Matrix& output_grad) {
  if (tape.network_id != net.id() || tape.network_version != net.version() ||
      tape.pre.size() != net.depth()) {
    throw Error("stale or mismatched tape: network changed since the forward pass");
  }
  const Matrix& last = tape.pre.back();
  if (output_grad.rows() != last.rows() || output_grad.cols() != last.cols()) {
    throw DimensionError("output gradient shape " + shape_string(output_grad) +
                         " != output shape " + shape_string(last));
  }

  BackwardResult result;
  result.grads.weights.resize(net.depth());
  result.grads.bias.resize(net.depth());

  Matrix grad = output_grad;
  for (std::size_t li = net.depth(); li-- > 0;) {
    const auto& layer = net.layers()[li];
    const Matrix& pre = tape.pre[li];
    if (layer.activation != Activation::Identity) {
      auto g = grad.values();
      auto p = pre.values();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= activate_derivative(layer.activation, p[i]);
    }
    kernels::gemm_tn(tape.inputs[li], grad, result.grads.weights[li]);
    auto& db = result.grads.bias[li];
    db.assign(layer.out_dim(), 0.0);
    for (std::size_t r = 0; r < grad.rows(); ++r) {
      auto row = grad.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) db[c] += row[c];
    }
    Matrix next;
    kernels::gemm_nt(grad, layer.weights, next);
    grad = std::move(next);
  }
  result.input_grad = std::move(grad);
  return result;
}

}  // namespace gaia
