#pragma once

#include <optional>
#include <vector>

#include "amtd/actor_critic.hpp"
#include "amtd/agent.hpp"
#include "amtd/context_gate.hpp"
#include "amtd/replay.hpp"
#include "amtd/returns.hpp"

namespace amtd {

struct ActiveRollout {
  std::vector<SelectedSample> samples;
  double episode_return = 0.0;
  std::size_t steps = 0;
};

/// Per-window branch bookkeeping shared by the discrete and continuous updates.
struct BranchPlan {
  struct Branch {
    double partial_return = 0.0;  // discounted segment rewards up to the bootstrap state
    double discount = 1.0;        // gamma^(raw steps to the bootstrap state)
    bool terminal = false;
    const Observation* bootstrap_state = nullptr;
    const SelectedSample* context = nullptr;  // lookahead pair compared by the gate
  };
  std::vector<std::vector<Branch>> windows;

  // Branch j (1-based) bootstraps at the state that closes the j-th segment of the window.
  static BranchPlan build(const std::vector<LookaheadWindow>& batch, std::size_t l, double gamma);
};

// Gates for every window of `plan`: b_1 = 1, b_j = [f(anchor) == f(j-th lookahead)].
// A null classifier or `force_on` turns every available branch on.
std::vector<GateVector> infer_window_gates(const ContextClassifier* classifier, const ActionSpace& space,
                                           const std::vector<LookaheadWindow>& batch, const BranchPlan& plan,
                                           bool force_on);

/// Chunked active selection plus gated multi-step targets with a softmax actor and
/// expected-Sarsa bootstrapping.
class DiscreteActiveAgent final : public Agent {
 public:
  DiscreteActiveAgent(std::size_t observation_size, std::size_t num_actions, AgentConfig config, std::uint64_t seed);

  std::string kind() const override { return "active"; }
  Action act(const Observation& state, bool explore) override;
  EpisodeResult train_episode(Environment& env, std::uint64_t env_seed, std::size_t episode) override;
  std::vector<double> parameters() const override;

  ActiveRollout run_episode_active(Environment& env, std::uint64_t env_seed, std::size_t interval);
  UpdateDiagnostics update_adaptive(std::size_t iterations);
  UpdateDiagnostics update_on_batch(const std::vector<LookaheadWindow>& batch);

  // Gates per window, b_1 first; sized to the window's available branches.
  std::vector<GateVector> infer_gates(const std::vector<LookaheadWindow>& batch, const BranchPlan& plan) const;

  Vector policy(const Observation& s) const;
  double state_value(const Observation& s) const;  // sum_a pi(a|s) Q(s, a)
  double td_error(const Transition& t) const;
  SelectionScore score(const Transition& t) const;

  void set_behavior(BehaviorPolicy behavior) { behavior_ = std::move(behavior); }

  const AgentConfig& config() const { return cfg_; }
  const Network& actor() const { return nets_.actor; }
  const Network& critic() const { return nets_.critic; }
  const DiscreteActorCritic& nets() const { return nets_; }
  const ContextClassifier& classifier() const { return *classifier_; }
  ContextClassifier& classifier() { return *classifier_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  ReplayBuffer& buffer() { return buffer_; }

 private:
  AgentConfig cfg_;
  std::size_t obs_size_;
  std::size_t num_actions_;
  Rng rng_;
  DiscreteActorCritic nets_;
  std::optional<ContextClassifier> classifier_;
  ReplayBuffer buffer_;
  ReturnWeights weights_;
  BehaviorPolicy behavior_;
};

/// Chunked active selection plus gated multi-step targets on a TD3-style deterministic
/// actor with twin critics: branch 1 bootstraps on the twin minimum, later branches on the
/// twin average.
class ContinuousActiveAgent final : public Agent {
 public:
  ContinuousActiveAgent(std::size_t observation_size, const ActionSpace& space, AgentConfig config,
                        std::uint64_t seed);

  std::string kind() const override { return "active"; }
  Action act(const Observation& state, bool explore) override;
  EpisodeResult train_episode(Environment& env, std::uint64_t env_seed, std::size_t episode) override;
  std::vector<double> parameters() const override;

  ActiveRollout run_episode_active(Environment& env, std::uint64_t env_seed, std::size_t interval);
  UpdateDiagnostics update_adaptive(std::size_t iterations);
  UpdateDiagnostics update_on_batch(const std::vector<LookaheadWindow>& batch);
  std::vector<GateVector> infer_gates(const std::vector<LookaheadWindow>& batch, const BranchPlan& plan) const;

  Vector mean_action(const Observation& s) const;
  double td_error(const Transition& t) const;
  SelectionScore score(const Transition& t) const;

  void set_behavior(BehaviorPolicy behavior) { behavior_ = std::move(behavior); }

  const AgentConfig& config() const { return cfg_; }
  const Network& actor() const { return nets_.actor; }
  const Network& critic1() const { return nets_.critic1; }
  const Network& critic2() const { return nets_.critic2; }
  const ContinuousActorCritic& nets() const { return nets_; }
  const ContextClassifier& classifier() const { return *classifier_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  ReplayBuffer& buffer() { return buffer_; }
  std::size_t update_count() const { return updates_; }

 private:
  AgentConfig cfg_;
  std::size_t obs_size_;
  ActionSpace space_;
  Rng rng_;
  ContinuousActorCritic nets_;
  std::optional<ContextClassifier> classifier_;
  ReplayBuffer buffer_;
  ReturnWeights weights_;
  BehaviorPolicy behavior_;
  std::size_t updates_ = 0;
};

}  // namespace amtd
