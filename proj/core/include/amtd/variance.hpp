#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "amtd/tensor.hpp"

namespace amtd {

/// Markov reward chain (a fixed policy already folded in) used to probe the
/// variance recursion of n-step returns.
struct RewardChain {
  Matrix transition;           // row-stochastic, num_states x num_states
  Vector reward_mean;          // per state
  Vector reward_noise_std;     // per state, i.i.d. Gaussian
  double gamma = 0.9;
  std::size_t start_state = 0;
  Vector values;               // bootstrap values; exact_values() when left empty

  std::size_t num_states() const { return static_cast<std::size_t>(reward_mean.size()); }
  // Solves (I - gamma P) V = r.
  Vector exact_values() const;

  static RewardChain random(std::size_t num_states, double gamma, double noise_std, std::uint64_t seed);
  static RewardChain deterministic_cycle(std::size_t num_states, double gamma);
};

struct VarianceReport {
  std::size_t n = 0;
  std::size_t rollouts = 0;
  double var_n = 0.0;          // Var(R^n)
  double var_n_minus_1 = 0.0;  // Var(R^{n-1})
  double var_delta = 0.0;      // Var(delta_n), delta_n = r_{n-1} + gamma V(s_n) - V(s_{n-1})
  double cov = 0.0;            // Cov(R^{n-1}, delta_n)
  // var_n - var_n_minus_1 - gamma^{2(n-1)} var_delta - 2 gamma^{n-1} cov
  double exact_residual = 0.0;
  // var_n - var_n_minus_1 - gamma^{2(n-1)} var_delta
  double approx_residual = 0.0;
  double exact_residual_stderr = 0.0;
  bool low_rollout_warning = false;
};

/// Each moment is estimated from its own disjoint quarter of the rollouts, so the exact
/// residual carries genuine Monte-Carlo error; its standard error comes from the
/// large-sample variance of sample variances and covariances.
VarianceReport variance_recursion_check(const RewardChain& chain, std::size_t n, std::size_t num_rollouts,
                                        std::uint64_t seed);

// Var(R^k) for k = 1..max_n, all from the same rollouts.
std::vector<double> return_variances(const RewardChain& chain, std::size_t max_n, std::size_t num_rollouts,
                                     std::uint64_t seed);

void write_variance_csv(std::ostream& out, const std::vector<VarianceReport>& reports);

}  // namespace amtd
