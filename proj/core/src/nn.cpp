#include "amtd/nn.hpp"

#include <cmath>
#include <cstring>

#include "amtd/errors.hpp"

namespace amtd {

std::string to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::softmax: return "softmax";
  }
  return "identity";
}

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  if (s == "softmax") return Activation::softmax;
  throw UsageError("unknown activation '" + s + "'");
}

Network::Network(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw DimensionError("network needs at least one layer");
  std::size_t offset = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.in == 0 || l.out == 0) throw DimensionError("layer dimensions must be positive");
    if (i > 0 && layers_[i - 1].out != l.in) {
      throw DimensionError("layer " + std::to_string(i) + " input " + std::to_string(l.in) +
                           " does not match previous output " + std::to_string(layers_[i - 1].out));
    }
    if (l.activation == Activation::softmax && i + 1 != layers_.size()) {
      throw DimensionError("softmax is only supported on the output layer");
    }
    offsets_.push_back(offset);
    offset += l.out * l.in + l.out;
  }
  params_.assign(offset, 0.0);
}

Network Network::mlp(const std::vector<std::size_t>& sizes, Activation hidden, Activation output) {
  if (sizes.size() < 2) throw DimensionError("mlp needs at least input and output sizes");
  std::vector<LayerSpec> layers;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    layers.push_back({sizes[i], sizes[i + 1], i + 2 == sizes.size() ? output : hidden});
  }
  return Network(std::move(layers));
}

void Network::init_uniform(Rng& rng) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layers_[i].in));
    auto w = weight(i);
    for (Eigen::Index k = 0; k < w.size(); ++k) w.data()[k] = uniform(rng, -bound, bound);
    auto b = bias(i);
    for (Eigen::Index k = 0; k < b.size(); ++k) b[k] = uniform(rng, -bound, bound);
  }
}

void Network::zero_layer(std::size_t layer) {
  weight(layer).setZero();
  bias(layer).setZero();
}

void Network::set_params(std::span<const double> values) {
  if (values.size() != params_.size()) throw DimensionError("parameter vector length mismatch");
  if (!all_finite(values)) throw NumericError("non-finite parameter");
  std::copy(values.begin(), values.end(), params_.begin());
}

Eigen::Map<Matrix> Network::weight(std::size_t layer) {
  const auto& l = layers_.at(layer);
  return {params_.data() + offsets_[layer], static_cast<Eigen::Index>(l.out),
          static_cast<Eigen::Index>(l.in)};
}

Eigen::Map<const Matrix> Network::weight(std::size_t layer) const {
  const auto& l = layers_.at(layer);
  return {params_.data() + offsets_[layer], static_cast<Eigen::Index>(l.out),
          static_cast<Eigen::Index>(l.in)};
}

Eigen::Map<Vector> Network::bias(std::size_t layer) {
  const auto& l = layers_.at(layer);
  return {params_.data() + offsets_[layer] + l.out * l.in, static_cast<Eigen::Index>(l.out)};
}

Eigen::Map<const Vector> Network::bias(std::size_t layer) const {
  const auto& l = layers_.at(layer);
  return {params_.data() + offsets_[layer] + l.out * l.in, static_cast<Eigen::Index>(l.out)};
}

namespace {

void apply_activation(Matrix& z, Activation a) {
  switch (a) {
    case Activation::identity:
      break;
    case Activation::relu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::tanh:
      z = z.array().tanh().matrix();
      break;
    case Activation::softmax:
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        auto col = z.col(c);
        col.array() = (col.array() - col.maxCoeff()).exp();
        col /= col.sum();
      }
      break;
  }
}

// dL/dz from dL/dy given y = act(z).
Matrix activation_backward(const Matrix& y, const Matrix& dy, Activation a) {
  switch (a) {
    case Activation::identity:
      return dy;
    case Activation::relu:
      return (y.array() > 0.0).select(dy, 0.0);
    case Activation::tanh:
      return (dy.array() * (1.0 - y.array().square())).matrix();
    case Activation::softmax: {
      Matrix dz(dy.rows(), dy.cols());
      for (Eigen::Index c = 0; c < dy.cols(); ++c) {
        const double dot = y.col(c).dot(dy.col(c));
        dz.col(c) = (y.col(c).array() * (dy.col(c).array() - dot)).matrix();
      }
      return dz;
    }
  }
  return dy;
}

}  // namespace

Matrix Network::run(const Matrix& x, GradTape* tape) const {
  if (layers_.empty()) throw UsageError("forward on an empty network");
  if (static_cast<std::size_t>(x.rows()) != input_size()) {
    throw DimensionError("network expects input dimension " + std::to_string(input_size()) +
                         ", got " + std::to_string(x.rows()));
  }
  if (tape != nullptr) {
    tape->owner_ = this;
    tape->input_ = x;
    tape->outputs_.clear();
    tape->outputs_.reserve(layers_.size());
  }
  Matrix h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Matrix z = weight(i) * h;
    z.colwise() += bias(i);
    apply_activation(z, layers_[i].activation);
    h = std::move(z);
    if (tape != nullptr) tape->outputs_.push_back(h);
  }
  return h;
}

Matrix Network::forward(const Matrix& x) const { return run(x, nullptr); }

Matrix Network::forward(const Matrix& x, GradTape& tape) const { return run(x, &tape); }

Tensor Network::forward(const Tensor& x) const { return Tensor::from_columns(run(x.to_columns(), nullptr)); }

void Network::backward(const GradTape& tape, const Matrix& out_grad, std::span<double> grad,
                       Matrix* input_grad, GradientOf of) const {
  if (tape.empty()) throw UsageError("backward called with an empty tape");
  if (tape.size() != layers_.size() || !(tape.owner_ == this || tape.owner_->same_shape(*this))) {
    throw UsageError("tape was recorded by a different network");
  }
  if (grad.size() != params_.size()) throw DimensionError("gradient buffer length mismatch");
  const Matrix& last = tape.outputs_.back();
  if (out_grad.rows() != last.rows() || out_grad.cols() != last.cols()) {
    throw DimensionError("output gradient shape does not match the recorded output");
  }

  Matrix upstream = out_grad;
  for (std::size_t n = layers_.size(); n-- > 0;) {
    const auto& spec = layers_[n];
    const Matrix& y = tape.outputs_[n];
    const Matrix& x = n == 0 ? tape.input_ : tape.outputs_[n - 1];
    Matrix dz = (n + 1 == layers_.size() && of == GradientOf::output_logits)
                    ? upstream
                    : activation_backward(y, upstream, spec.activation);

    Eigen::Map<Matrix> dw(grad.data() + offsets_[n], static_cast<Eigen::Index>(spec.out),
                          static_cast<Eigen::Index>(spec.in));
    Eigen::Map<Vector> db(grad.data() + offsets_[n] + spec.out * spec.in,
                          static_cast<Eigen::Index>(spec.out));
    // Aligned temporaries keep the sums independent of the flat buffer's address.
    const Matrix dw_step = dz * x.transpose();
    const Vector db_step = dz.rowwise().sum();
    dw += dw_step;
    db += db_step;
    if (n > 0 || input_grad != nullptr) upstream = weight(n).transpose() * dz;
  }
  if (input_grad != nullptr) *input_grad = std::move(upstream);
}

std::vector<double> Network::backward(const GradTape& tape, const Matrix& out_grad, GradientOf of) const {
  std::vector<double> grad(params_.size(), 0.0);
  backward(tape, out_grad, grad, nullptr, of);
  return grad;
}

bool Network::same_shape(const Network& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& a = layers_[i];
    const auto& b = other.layers_[i];
    if (a.in != b.in || a.out != b.out || a.activation != b.activation) return false;
  }
  return true;
}

void soft_update(Network& target, const Network& online, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw DomainError("soft update rate must lie in (0, 1]");
  if (!target.same_shape(online)) throw DimensionError("soft update between differently shaped networks");
  auto t = target.params();
  auto o = online.params();
  if (tau == 1.0) {
    std::copy(o.begin(), o.end(), t.begin());
    return;
  }
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = tau * o[i] + (1.0 - tau) * t[i];
}

std::uint64_t checksum(std::span<const double> values) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace amtd
