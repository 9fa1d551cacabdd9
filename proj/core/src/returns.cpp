#include "amtd/returns.hpp"

#include <cmath>

#include "amtd/errors.hpp"
#include "amtd/tensor.hpp"

namespace amtd {

ReturnWeights ReturnWeights::geometric(std::size_t l, double base, double first) {
  if (l == 0) throw UsageError("need at least one return branch");
  if (!(base > 0.0 && base <= 1.0)) throw DomainError("lambda decay base must lie in (0, 1]");
  if (!(first > 0.0)) throw DomainError("first lambda must be positive");
  ReturnWeights w;
  w.decay_base = base;
  w.lambdas.resize(l);
  double v = first;
  for (std::size_t i = 0; i < l; ++i) {
    w.lambdas[i] = v;
    v *= base;
  }
  return w;
}

std::size_t GateVector::count_on() const {
  std::size_t n = 0;
  for (auto b : bits) n += b != 0;
  return n;
}

double td_error(double r, double v_next, double v, double gamma) { return r + gamma * v_next - v; }

NStepTarget n_step_expected_sarsa(std::span<const double> rewards, double terminal_q, double gamma) {
  if (rewards.empty()) throw UsageError("n-step target needs at least one reward");
  if (!all_finite(rewards) || !std::isfinite(terminal_q) || !std::isfinite(gamma)) {
    throw NumericError("n-step target inputs must be finite");
  }
  double value = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    value += discount * r;
    discount *= gamma;
  }
  value += discount * terminal_q;
  return {rewards.size(), value};
}

NStepTarget segmented_target(std::span<const RewardSegment> segments, double terminal_q, double gamma) {
  if (segments.empty()) throw UsageError("segmented target needs at least one segment");
  double value = 0.0;
  double discount = 1.0;
  std::size_t steps = 0;
  for (const auto& s : segments) {
    if (s.steps == 0) throw UsageError("reward segments must span at least one step");
    value += discount * s.reward;
    discount *= std::pow(gamma, static_cast<double>(s.steps));
    steps += s.steps;
  }
  value += discount * terminal_q;
  if (!std::isfinite(value)) throw NumericError("non-finite segmented target");
  return {steps, value};
}

double gated_return(std::span<const double> values, std::span<const double> lambdas,
                    std::span<const std::uint8_t> gates) {
  if (values.size() != lambdas.size() || values.size() != gates.size()) {
    throw DimensionError("targets, weights and gates must have equal length");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (gates[i] == 0) continue;
    num += lambdas[i] * values[i];
    den += lambdas[i];
  }
  if (!(den > 0.0)) throw UsageError("gated return has no active branch weight");
  return num / den;
}

double gated_return(std::span<const NStepTarget> targets, const ReturnWeights& weights, const GateVector& gates) {
  std::vector<double> values(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) values[i] = targets[i].value;
  return gated_return(values, weights.lambdas, gates.bits);
}

double averaged_return(std::span<const NStepTarget> targets, const ReturnWeights& weights) {
  if (targets.size() != weights.size()) throw DimensionError("targets and weights must have equal length");
  return gated_return(targets, weights, GateVector::all_on(targets.size()));
}

}  // namespace amtd
