#include "amtd/context_gate.hpp"

#include <algorithm>
#include <cmath>

#include "amtd/errors.hpp"

namespace amtd {

int make_label(double q_value, double v_value) { return q_value - v_value >= 0.0 ? 1 : -1; }

ContextClassifier::ContextClassifier(std::size_t state_size, std::size_t action_size, ClassifierConfig config,
                                     Rng& init_rng)
    : state_size_(state_size), action_size_(action_size), config_(std::move(config)) {
  std::vector<std::size_t> sizes{state_size_ + action_size_ + (config_.context_features ? 2 : 0)};
  sizes.insert(sizes.end(), config_.hidden.begin(), config_.hidden.end());
  sizes.push_back(2);
  net_ = Network::mlp(sizes, config_.hidden_activation, Activation::softmax);
  net_.init_uniform(init_rng);
  optimizer_ = Optimizer(config_.optimizer, config_.learning_rate, net_.num_params());
  grad_.assign(net_.num_params(), 0.0);
}

Vector ContextClassifier::make_input(const Vector& state, const Vector& action, double step_gap,
                                     double action_gap) const {
  if (static_cast<std::size_t>(state.size()) != state_size_ ||
      static_cast<std::size_t>(action.size()) != action_size_) {
    throw DimensionError("classifier input has the wrong state or action dimension");
  }
  Vector x(static_cast<Eigen::Index>(input_size()));
  x.head(state.size()) = state;
  x.segment(state.size(), action.size()) = action;
  if (config_.context_features) {
    x[x.size() - 2] = step_gap;
    x[x.size() - 1] = action_gap;
  }
  return x;
}

Vector ContextClassifier::probabilities(const Vector& input) const { return net_.forward(Matrix(input)).col(0); }

int ContextClassifier::predict(const Vector& state, const Vector& action) const {
  const Vector p = probabilities(make_input(state, action));
  return p[0] >= p[1] ? 1 : -1;
}

std::vector<int> ContextClassifier::predict_batch(const Matrix& inputs) const {
  const Matrix p = net_.forward(inputs);
  std::vector<int> out(static_cast<std::size_t>(p.cols()));
  for (Eigen::Index c = 0; c < p.cols(); ++c) out[static_cast<std::size_t>(c)] = p(0, c) >= p(1, c) ? 1 : -1;
  return out;
}

double ContextClassifier::train_step(const Matrix& inputs, std::span<const int> labels) {
  if (labels.empty()) throw UsageError("classifier training batch is empty");
  if (static_cast<std::size_t>(inputs.cols()) != labels.size()) {
    throw DimensionError("classifier inputs and labels differ in count");
  }
  GradTape tape;
  const Matrix p = net_.forward(inputs, tape);
  const double n = static_cast<double>(labels.size());
  Matrix dlogits = p / n;
  double loss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const Eigen::Index cls = labels[i] > 0 ? 0 : 1;
    loss -= std::log(std::max(p(cls, col), 1e-300));
    dlogits(cls, col) -= 1.0 / n;
  }
  std::fill(grad_.begin(), grad_.end(), 0.0);
  net_.backward(tape, dlogits, grad_, nullptr, GradientOf::output_logits);
  optimizer_.step(net_.params(), grad_);
  return loss / n;
}

double ContextClassifier::train_step(std::span<const AdvantageLabel> batch) {
  if (batch.empty()) throw UsageError("classifier training batch is empty");
  Matrix inputs(static_cast<Eigen::Index>(input_size()), static_cast<Eigen::Index>(batch.size()));
  std::vector<int> labels(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    inputs.col(static_cast<Eigen::Index>(i)) = make_input(batch[i].state, batch[i].action);
    labels[i] = batch[i].label;
  }
  return train_step(inputs, labels);
}

void ContextClassifier::remember(std::span<const AdvantageLabel> batch) {
  for (const auto& l : batch) {
    recent_.push_back(l);
    if (recent_.size() > config_.buffer_capacity) recent_.pop_front();
  }
}

double ContextClassifier::recent_accuracy() const {
  if (recent_.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& l : recent_) hits += predict(l.state, l.action) == l.label;
  return static_cast<double>(hits) / static_cast<double>(recent_.size());
}

std::uint8_t compute_gate(const ContextClassifier& clf, const ContextPair& current, const ContextPair& lookahead) {
  const Vector x_now = clf.make_input(current.state, current.action);
  Vector x_ahead;
  if (clf.config().context_features) {
    const double gap = std::abs(static_cast<double>(lookahead.step_index) - static_cast<double>(current.step_index));
    x_ahead = clf.make_input(lookahead.state, lookahead.action, gap, (current.action - lookahead.action).norm());
  } else {
    x_ahead = clf.make_input(lookahead.state, lookahead.action);
  }
  Matrix both(x_now.size(), 2);
  both.col(0) = x_now;
  both.col(1) = x_ahead;
  const auto f = clf.predict_batch(both);
  return f[0] == f[1] ? 1 : 0;
}

}  // namespace amtd
