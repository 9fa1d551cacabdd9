#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "amtd/random.hpp"
#include "amtd/tensor.hpp"

namespace amtd {

enum class Activation { identity, relu, tanh, softmax };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct LayerSpec {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation activation = Activation::identity;
};

class Network;

/// Activations recorded by a forward pass; one node per layer.
/// Backward replays the nodes in reverse order, each exactly once.
class GradTape {
 public:
  bool empty() const { return outputs_.empty(); }
  std::size_t size() const { return outputs_.size(); }
  const Matrix& input() const { return input_; }
  const Matrix& output() const { return outputs_.back(); }

 private:
  friend class Network;
  const Network* owner_ = nullptr;
  Matrix input_;
  std::vector<Matrix> outputs_;
};

/// Where the incoming gradient of `backward` is taken with respect to.
enum class GradientOf {
  output,          // post-activation of the last layer
  output_logits,   // pre-activation of the last layer (skips its activation)
};

/// Dense feed-forward network. Parameters live in one flat vector; layer i owns a
/// column-major weight block (out x in) followed by its bias (out).
/// Inputs and outputs are column batches: features x batch.
class Network {
 public:
  Network() = default;
  explicit Network(std::vector<LayerSpec> layers);

  // sizes = {input, hidden..., output}
  static Network mlp(const std::vector<std::size_t>& sizes, Activation hidden, Activation output);

  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  void init_uniform(Rng& rng);
  void zero_layer(std::size_t layer);

  std::size_t input_size() const { return layers_.front().in; }
  std::size_t output_size() const { return layers_.back().out; }
  std::size_t num_params() const { return params_.size(); }
  const std::vector<LayerSpec>& layers() const { return layers_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  void set_params(std::span<const double> values);

  Eigen::Map<Matrix> weight(std::size_t layer);
  Eigen::Map<const Matrix> weight(std::size_t layer) const;
  Eigen::Map<Vector> bias(std::size_t layer);
  Eigen::Map<const Vector> bias(std::size_t layer) const;

  Matrix forward(const Matrix& x) const;
  Matrix forward(const Matrix& x, GradTape& tape) const;
  Tensor forward(const Tensor& x) const;

  // Accumulates dLoss/dparams into `grad` (length num_params) and optionally writes dLoss/dinput.
  void backward(const GradTape& tape, const Matrix& out_grad, std::span<double> grad,
                Matrix* input_grad = nullptr, GradientOf of = GradientOf::output) const;
  std::vector<double> backward(const GradTape& tape, const Matrix& out_grad,
                               GradientOf of = GradientOf::output) const;

  bool same_shape(const Network& other) const;

 private:
  Matrix run(const Matrix& x, GradTape* tape) const;

  std::vector<LayerSpec> layers_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

/// target <- tau * online + (1 - tau) * target, elementwise.
void soft_update(Network& target, const Network& online, double tau);

// Order-sensitive FNV-1a over the raw parameter bytes.
std::uint64_t checksum(std::span<const double> values);

}  // namespace amtd
