#pragma once

#include <deque>
#include <vector>

#include "amtd/actor_critic.hpp"
#include "amtd/agent.hpp"

namespace amtd {

/// Uniform replay of raw transitions.
class TransitionReplay {
 public:
  explicit TransitionReplay(std::size_t capacity) : capacity_(capacity) {}
  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  const Transition& at(std::size_t i) const { return items_[i]; }
  std::vector<const Transition*> sample(std::size_t batch_size, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

/// One-step actor-critic with a softmax actor and an expected-Sarsa Q critic.
/// Replay mode stores each episode and then runs one update per collected transition;
/// on-policy mode updates immediately on every transition.
class VanillaActorCritic final : public Agent {
 public:
  VanillaActorCritic(std::size_t observation_size, std::size_t num_actions, AgentConfig config, std::uint64_t seed);

  std::string kind() const override { return "vanilla_ac"; }
  Action act(const Observation& state, bool explore) override;
  EpisodeResult train_episode(Environment& env, std::uint64_t env_seed, std::size_t episode) override;
  std::vector<double> parameters() const override;

  UpdateDiagnostics update_on_batch(const std::vector<const Transition*>& batch);

  const Network& actor() const { return nets_.actor; }
  const Network& critic() const { return nets_.critic; }
  const DiscreteActorCritic& nets() const { return nets_; }

 private:
  AgentConfig cfg_;
  std::size_t obs_size_;
  std::size_t num_actions_;
  Rng rng_;
  DiscreteActorCritic nets_;
  TransitionReplay replay_;
};

/// Monte-Carlo policy gradient with a learned state-value baseline.
class Reinforce final : public Agent {
 public:
  Reinforce(std::size_t observation_size, std::size_t num_actions, AgentConfig config, std::uint64_t seed);

  std::string kind() const override { return "reinforce"; }
  Action act(const Observation& state, bool explore) override;
  EpisodeResult train_episode(Environment& env, std::uint64_t env_seed, std::size_t episode) override;
  std::vector<double> parameters() const override;

  Vector policy(const Observation& s) const;

 private:
  AgentConfig cfg_;
  std::size_t obs_size_;
  std::size_t num_actions_;
  Rng rng_;
  Network actor_, baseline_;
  Optimizer actor_opt_, baseline_opt_;
};

/// Deep Q-learning with epsilon-greedy exploration, replay and a soft-updated target.
class Dqn final : public Agent {
 public:
  Dqn(std::size_t observation_size, std::size_t num_actions, AgentConfig config, std::uint64_t seed);

  std::string kind() const override { return "dqn"; }
  Action act(const Observation& state, bool explore) override;
  EpisodeResult train_episode(Environment& env, std::uint64_t env_seed, std::size_t episode) override;
  std::vector<double> parameters() const override;

  double epsilon() const;
  UpdateDiagnostics update_on_batch(const std::vector<const Transition*>& batch);
  const Network& q_network() const { return q_; }

 private:
  AgentConfig cfg_;
  std::size_t obs_size_;
  std::size_t num_actions_;
  Rng rng_;
  Network q_, q_target_;
  Optimizer opt_;
  TransitionReplay replay_;
  std::vector<double> grad_;
};

/// Deterministic-policy agent: DDPG-lite (single critic) or TD3-lite (twin critics,
/// clipped target smoothing, delayed actor and target updates).
class DeterministicAgent final : public Agent {
 public:
  enum class Variant { ddpg, td3 };

  DeterministicAgent(Variant variant, std::size_t observation_size, const ActionSpace& space, AgentConfig config,
                     std::uint64_t seed);

  std::string kind() const override { return variant_ == Variant::td3 ? "td3" : "ddpg"; }
  Action act(const Observation& state, bool explore) override;
  EpisodeResult train_episode(Environment& env, std::uint64_t env_seed, std::size_t episode) override;
  std::vector<double> parameters() const override;

  UpdateDiagnostics update_on_batch(const std::vector<const Transition*>& batch);
  // Critic target for each transition of the batch (consumes smoothing noise).
  Vector critic_targets(const std::vector<const Transition*>& batch);

  const Network& actor() const { return nets_.actor; }
  const Network& critic1() const { return nets_.critic1; }
  const Network& critic2() const { return nets_.critic2; }
  const ContinuousActorCritic& nets() const { return nets_; }
  std::size_t update_count() const { return updates_; }

 private:
  Variant variant_;
  AgentConfig cfg_;
  std::size_t obs_size_;
  ActionSpace space_;
  Rng rng_;
  ContinuousActorCritic nets_;
  TransitionReplay replay_;
  std::size_t updates_ = 0;
};

}  // namespace amtd
