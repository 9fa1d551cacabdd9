#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "amtd/nn.hpp"
#include "amtd/optim.hpp"

namespace amtd {

struct ClassifierConfig {
  std::vector<std::size_t> hidden = {20};
  Activation hidden_activation = Activation::relu;
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 1e-2;
  std::size_t buffer_capacity = 10'000;
  // Appends (step gap, ||a_current - a_lookahead||) to the classifier input.
  bool context_features = false;
};

/// One (state, action) context. `step_index` only matters with context features on.
struct ContextPair {
  Vector state;
  Vector action;
  std::size_t step_index = 0;
};

struct AdvantageLabel {
  Vector state;
  Vector action;
  int label = 1;  // sign of Q(s,a) - V(s), zero mapped to +1
};

// +1 if q - v >= 0, -1 otherwise.
int make_label(double q_value, double v_value);

/// Binary advantage-sign classifier f(s, a) with a two-way softmax head.
/// Output unit 0 is the +1 class; ties predict +1.
class ContextClassifier {
 public:
  ContextClassifier(std::size_t state_size, std::size_t action_size, ClassifierConfig config, Rng& init_rng);

  int predict(const Vector& state, const Vector& action) const;
  // Column-batched inputs (see input_size()); returns +1 / -1 per column.
  std::vector<int> predict_batch(const Matrix& inputs) const;
  // P(+1), P(-1) for one input column.
  Vector probabilities(const Vector& input) const;

  // One cross-entropy step on the batch; returns the mean loss before the step.
  double train_step(std::span<const AdvantageLabel> batch);
  double train_step(const Matrix& inputs, std::span<const int> labels);

  Vector make_input(const Vector& state, const Vector& action, double step_gap = 0.0,
                    double action_gap = 0.0) const;

  std::size_t input_size() const { return net_.input_size(); }
  std::size_t state_size() const { return state_size_; }
  std::size_t action_size() const { return action_size_; }
  const ClassifierConfig& config() const { return config_; }
  const Network& net() const { return net_; }
  Network& mutable_net() { return net_; }

  // Bounded FIFO of the labels seen most recently.
  void remember(std::span<const AdvantageLabel> batch);
  const std::deque<AdvantageLabel>& recent_labels() const { return recent_; }
  double recent_accuracy() const;

 private:
  std::size_t state_size_;
  std::size_t action_size_;
  ClassifierConfig config_;
  Network net_;
  Optimizer optimizer_;
  std::vector<double> grad_;
  std::deque<AdvantageLabel> recent_;
};

// b = [f(current) == f(lookahead)]
std::uint8_t compute_gate(const ContextClassifier& clf, const ContextPair& current, const ContextPair& lookahead);

}  // namespace amtd
