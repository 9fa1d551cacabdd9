#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace amtd {

/// Branch weights lambda_1..lambda_l of the averaged multi-step return.
struct ReturnWeights {
  std::vector<double> lambdas;
  double decay_base = 0.5;

  // lambda_i = first * base^(i-1), i = 1..l
  static ReturnWeights geometric(std::size_t l, double base = 0.5, double first = 1.0);
  std::size_t size() const { return lambdas.size(); }
};

/// Binary switches b_1..b_l; b_1 is kept on by every producer in this library.
struct GateVector {
  std::vector<std::uint8_t> bits;

  static GateVector all_on(std::size_t l) { return {std::vector<std::uint8_t>(l, 1)}; }
  std::size_t size() const { return bits.size(); }
  std::size_t count_on() const;
};

struct NStepTarget {
  std::size_t step_length = 1;
  double value = 0.0;
};

/// Reward accumulated over `steps` raw environment steps, already discounted to its first step.
struct RewardSegment {
  double reward = 0.0;
  std::size_t steps = 1;
};

// r + gamma * v_next - v
double td_error(double r, double v_next, double v, double gamma);

// sum_{k<n} gamma^k r_k + gamma^n terminal_q
NStepTarget n_step_expected_sarsa(std::span<const double> rewards, double terminal_q, double gamma);

// Same target over variable-length segments: the k-th segment is discounted by gamma to the
// number of raw steps preceding it; terminal_q by gamma to the total.
NStepTarget segmented_target(std::span<const RewardSegment> segments, double terminal_q, double gamma);

// sum lambda_i R_i / sum lambda_i
double averaged_return(std::span<const NStepTarget> targets, const ReturnWeights& weights);

// sum lambda_i b_i R_i / sum lambda_i b_i
double gated_return(std::span<const NStepTarget> targets, const ReturnWeights& weights, const GateVector& gates);

// Allocation-free form used inside batched updates; all spans have equal length.
double gated_return(std::span<const double> values, std::span<const double> lambdas,
                    std::span<const std::uint8_t> gates);

}  // namespace amtd
