#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "amtd/env.hpp"
#include "amtd/nn.hpp"
#include "amtd/optim.hpp"
#include "amtd/selection.hpp"

namespace amtd {

/// Discrete actor update: `expected` sums pi(a|s) A(s, a) over every action, `sampled` weights
/// log pi of the replayed action only.
enum class PolicyGradient { expected, sampled };

std::string to_string(PolicyGradient g);
PolicyGradient policy_gradient_from_string(const std::string& s);

struct AgentConfig {
  double gamma = 0.99;
  ChunkSchedule schedule;
  std::size_t lookahead = 1;  // l
  double beta = 0.1;
  double lambda_base = 0.5;

  double actor_lr = 1e-3;
  double critic_lr = 1e-2;
  double classifier_lr = 0.0;  // 0: follow critic_lr
  OptimizerKind optimizer = OptimizerKind::adam;
  std::vector<std::size_t> hidden;  // empty: {20} for discrete, {64, 64} for continuous
  Activation hidden_activation = Activation::relu;

  // Discrete actors. entropy_coef is a temperature in reward units.
  PolicyGradient policy_gradient = PolicyGradient::expected;
  double entropy_coef = 1.0;

  double tau = 0.001;
  std::size_t batch_size = 100;
  std::size_t replay_capacity = 100'000;
  std::size_t warmup_steps = 1000;

  // Continuous control; noise scales are fractions of the action half-range.
  double exploration_noise = 0.1;
  double target_noise = 0.2;
  double target_noise_clip = 0.5;
  std::size_t policy_delay = 2;

  bool force_gates_on = false;
  bool context_features = false;
  std::size_t classifier_buffer = 10'000;

  // Baselines.
  bool on_policy = false;          // vanilla actor-critic: update on every transition, no replay
  double epsilon_start = 1.0;      // DQN
  double epsilon_end = 0.05;
  std::size_t epsilon_decay_steps = 10'000;

  std::vector<std::size_t> hidden_for(bool discrete) const;
  double effective_classifier_lr() const { return classifier_lr > 0.0 ? classifier_lr : critic_lr; }
  // Empty when valid; the schedule is checked against `horizon`.
  std::vector<std::string> violations(std::size_t horizon = std::numeric_limits<std::size_t>::max()) const;
};

struct UpdateDiagnostics {
  bool ready = false;  // false while the buffer could not serve a batch
  std::size_t iterations = 0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double classifier_loss = 0.0;
  // Mean over windows of (sum_j b_j) / l.
  double gate_on_fraction = 0.0;
  std::vector<double> branch_gate_on;  // per branch j = 1..l, over windows where the branch exists
  std::vector<std::size_t> branch_windows;  // number of windows in which branch j existed
  bool actor_updated = false;
};

struct EpisodeResult {
  double train_return = 0.0;
  std::size_t steps = 0;
  UpdateDiagnostics updates;
};

/// Behaviour override for off-policy data collection: returns the action to execute.
using BehaviorPolicy = std::function<Action(const Observation&, Rng&)>;

class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string kind() const = 0;
  // explore=false is deterministic and never mutates any state.
  virtual Action act(const Observation& state, bool explore) = 0;
  virtual EpisodeResult train_episode(Environment& env, std::uint64_t env_seed, std::size_t episode) = 0;
  // Flattened parameters of every trainable network (actor first, then critics).
  virtual std::vector<double> parameters() const = 0;

  std::size_t total_steps() const { return total_steps_; }

 protected:
  std::size_t total_steps_ = 0;
};

using AgentPtr = std::unique_ptr<Agent>;

std::vector<std::string> agent_names();
bool agent_supports(const std::string& agent_kind, const ActionSpace& space);
AgentPtr make_agent(const std::string& agent_kind, const Environment& env, const AgentConfig& config,
                    std::uint64_t seed);

struct TrainOptions {
  std::size_t num_episodes = 100;
  std::size_t max_env_steps = 0;  // 0: bounded by num_episodes only
  std::size_t eval_interval = 1;  // 0 disables evaluation
  std::size_t eval_episodes = 5;
};

struct EpisodeRecord {
  std::size_t episode = 0;
  std::size_t total_steps = 0;
  double train_return = 0.0;
  std::optional<double> eval_return;
};

using LearningCurve = std::vector<EpisodeRecord>;
using EpisodeCallback = std::function<void(const Agent&, const EpisodeRecord&)>;

// Mean return of noise-free episodes on env seeds derived from `seed`.
double evaluate(Agent& agent, Environment& env, std::size_t episodes, std::uint64_t seed);

LearningCurve train(Agent& agent, Environment& env, const TrainOptions& options, std::uint64_t seed,
                    const EpisodeCallback& on_episode = {});
LearningCurve train(const std::string& agent_kind, const std::string& env_kind, const AgentConfig& config,
                    const TrainOptions& options, std::uint64_t seed);

// Shared helpers for the agent implementations.
namespace detail {

Matrix stack_columns(const std::vector<const Observation*>& columns, std::size_t rows);
std::size_t sample_categorical(const Vector& probabilities, Rng& rng);
std::size_t argmax(const Vector& v);
Network make_net(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out, Activation hidden_act,
                 Activation out_act, Rng& rng);

}  // namespace detail

}  // namespace amtd
