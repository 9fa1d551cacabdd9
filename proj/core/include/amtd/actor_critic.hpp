#pragma once

#include <cstddef>
#include <vector>

#include "amtd/agent.hpp"

namespace amtd {

/// Softmax actor and Q(s, .) critic with soft-updated targets.
struct DiscreteActorCritic {
  Network actor, actor_target, critic, critic_target;
  Optimizer actor_opt, critic_opt;
  std::vector<double> actor_grad, critic_grad;
  PolicyGradient policy_gradient = PolicyGradient::expected;
  double entropy_coef = 0.0;

  // Actor first, then critic, both from `init_rng`.
  static DiscreteActorCritic create(std::size_t observation_size, std::size_t num_actions,
                                    const AgentConfig& config, Rng& init_rng);

  // sum_a pi(a|s) Q(s, a) per column, from the target (or online) pair.
  Vector expected_values(const Matrix& states, bool use_target) const;

  struct StepResult {
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    Matrix q;   // critic output before the step
    Matrix pi;  // actor output before the step
  };
  // Critic regression to `targets`, policy-gradient actor step, then soft target updates.
  StepResult step(const Matrix& states, const std::vector<std::size_t>& actions, const Vector& targets, double tau);

  std::vector<double> parameters() const;
};

/// Tanh-squashed deterministic actor with one or two critics Q(s, a) and their targets.
struct ContinuousActorCritic {
  Network actor, actor_target, critic1, critic1_target, critic2, critic2_target;
  Optimizer actor_opt, critic1_opt, critic2_opt;
  std::vector<double> actor_grad, critic1_grad, critic2_grad;
  Vector center, half_range;
  bool twin = true;

  // Actor, then critic 1, then critic 2 (when twin), all from `init_rng`.
  static ContinuousActorCritic create(std::size_t observation_size, const ActionSpace& space,
                                      const AgentConfig& config, bool twin, Rng& init_rng);

  std::size_t action_size() const { return static_cast<std::size_t>(center.size()); }
  Matrix actions(const Network& policy, const Matrix& states) const;
  Matrix critic_input(const Matrix& states, const Matrix& actions) const;
  Vector q_values(const Network& critic, const Matrix& states, const Matrix& actions) const;

  // Target-actor actions at `states` plus clipped smoothing noise, drawn column-major over the
  // columns with use[c] set; other columns get the noise-free target action.
  Matrix smoothed_target_actions(const Matrix& states, const std::vector<bool>& use, double noise_std,
                                 double noise_clip, Rng& rng) const;

  // One regression step per critic towards `targets`; returns the mean loss over critics.
  double critic_step(const Matrix& states, const Matrix& actions, const Vector& targets);
  // Deterministic policy gradient through critic 1; returns -mean Q1(s, mu(s)) before the step.
  double actor_step(const Matrix& states);
  void update_targets(double tau);

  std::vector<double> parameters() const;
};

}  // namespace amtd
