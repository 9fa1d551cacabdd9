#include "amtd/agent.hpp"

#include <algorithm>

#include "amtd/active_agents.hpp"
#include "amtd/baselines.hpp"
#include "amtd/envs.hpp"
#include "amtd/errors.hpp"

namespace amtd {

std::vector<std::size_t> AgentConfig::hidden_for(bool discrete) const {
  if (!hidden.empty()) return hidden;
  if (discrete) return {20};
  return {64, 64};
}

std::string to_string(PolicyGradient g) { return g == PolicyGradient::sampled ? "sampled" : "expected"; }

PolicyGradient policy_gradient_from_string(const std::string& s) {
  if (s == "expected") return PolicyGradient::expected;
  if (s == "sampled") return PolicyGradient::sampled;
  throw UsageError("unknown policy gradient '" + s + "'");
}

std::vector<std::string> AgentConfig::violations(std::size_t horizon) const {
  std::vector<std::string> out;
  auto require = [&](bool ok, const char* message) {
    if (!ok) out.emplace_back(message);
  };
  require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]");
  require(lookahead >= 1, "lookahead must be at least 1");
  require(beta >= 0.0, "beta must be non-negative");
  require(lambda_base > 0.0, "lambda_base must be positive");
  require(actor_lr > 0.0, "actor_lr must be positive");
  require(critic_lr > 0.0, "critic_lr must be positive");
  require(classifier_lr >= 0.0, "classifier_lr must be non-negative");
  require(entropy_coef >= 0.0, "entropy_coef must be non-negative");
  require(tau > 0.0 && tau <= 1.0, "tau must lie in (0, 1]");
  require(batch_size >= 1, "batch_size must be at least 1");
  require(replay_capacity >= 1, "replay_capacity must be at least 1");
  require(exploration_noise >= 0.0, "exploration_noise must be non-negative");
  require(target_noise >= 0.0, "target_noise must be non-negative");
  require(target_noise_clip >= 0.0, "target_noise_clip must be non-negative");
  require(policy_delay >= 1, "policy_delay must be at least 1");
  require(classifier_buffer >= 1, "classifier_buffer must be at least 1");
  require(epsilon_start >= 0.0 && epsilon_start <= 1.0, "epsilon_start must lie in [0, 1]");
  require(epsilon_end >= 0.0 && epsilon_end <= epsilon_start, "epsilon_end must lie in [0, epsilon_start]");
  for (std::size_t h : hidden) require(h >= 1, "hidden layer sizes must be positive");
  require(hidden_activation != Activation::softmax, "hidden_activation cannot be softmax");
  for (auto& v : schedule.violations(horizon)) out.push_back(std::move(v));
  return out;
}

namespace detail {

Matrix stack_columns(const std::vector<const Observation*>& columns, std::size_t rows) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (static_cast<std::size_t>(columns[c]->size()) != rows) throw DimensionError("observation has the wrong size");
    m.col(static_cast<Eigen::Index>(c)) = *columns[c];
  }
  return m;
}

std::size_t sample_categorical(const Vector& probabilities, Rng& rng) {
  const double u = uniform(rng, 0.0, 1.0);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    acc += probabilities[i];
    if (u < acc) return static_cast<std::size_t>(i);
  }
  // Rounding left u above the cumulative sum: take the last action with positive mass.
  for (Eigen::Index i = probabilities.size() - 1; i > 0; --i) {
    if (probabilities[i] > 0.0) return static_cast<std::size_t>(i);
  }
  return 0;
}

std::size_t argmax(const Vector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<std::size_t>(best);
}

Network make_net(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out, Activation hidden_act,
                 Activation out_act, Rng& rng) {
  std::vector<std::size_t> sizes;
  sizes.reserve(hidden.size() + 2);
  sizes.push_back(in);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  Network net = Network::mlp(sizes, hidden_act, out_act);
  net.init_uniform(rng);
  return net;
}

}  // namespace detail

std::vector<std::string> agent_names() { return {"active", "vanilla_ac", "reinforce", "dqn", "ddpg", "td3"}; }

bool agent_supports(const std::string& kind, const ActionSpace& space) {
  if (kind == "active") return true;
  if (kind == "vanilla_ac" || kind == "reinforce" || kind == "dqn") return space.is_discrete();
  if (kind == "ddpg" || kind == "td3") return !space.is_discrete();
  return false;
}

AgentPtr make_agent(const std::string& kind, const Environment& env, const AgentConfig& config, std::uint64_t seed) {
  const auto names = agent_names();
  if (std::find(names.begin(), names.end(), kind) == names.end()) throw UsageError("unknown agent: " + kind);
  const ActionSpace space = env.action_space();
  if (!agent_supports(kind, space)) {
    throw UnsupportedError("agent " + kind + " does not support the action space of " + env.name());
  }
  const auto problems = config.violations(env.horizon());
  if (!problems.empty()) {
    std::string message = "invalid agent config:";
    for (const auto& p : problems) message += "\n  " + p;
    throw UsageError(message);
  }
  const std::size_t obs = env.observation_size();
  if (kind == "active") {
    if (space.is_discrete()) return std::make_unique<DiscreteActiveAgent>(obs, space.num_actions(), config, seed);
    return std::make_unique<ContinuousActiveAgent>(obs, space, config, seed);
  }
  if (kind == "vanilla_ac") return std::make_unique<VanillaActorCritic>(obs, space.num_actions(), config, seed);
  if (kind == "reinforce") return std::make_unique<Reinforce>(obs, space.num_actions(), config, seed);
  if (kind == "dqn") return std::make_unique<Dqn>(obs, space.num_actions(), config, seed);
  const auto variant = kind == "td3" ? DeterministicAgent::Variant::td3 : DeterministicAgent::Variant::ddpg;
  return std::make_unique<DeterministicAgent>(variant, obs, space, config, seed);
}

double evaluate(Agent& agent, Environment& env, std::size_t episodes, std::uint64_t seed) {
  if (episodes == 0) throw UsageError("evaluation needs at least one episode");
  double total = 0.0;
  for (std::size_t e = 0; e < episodes; ++e) {
    EnvState s = env.reset(derive_seed(seed, e));
    while (!s.done) {
      const Transition t = env.step(agent.act(s.observation, false));
      total += t.reward;
      s = env.state();
    }
  }
  return total / static_cast<double>(episodes);
}

LearningCurve train(Agent& agent, Environment& env, const TrainOptions& options, std::uint64_t seed,
                    const EpisodeCallback& on_episode) {
  LearningCurve curve;
  curve.reserve(std::min<std::size_t>(options.num_episodes, 100'000));
  for (std::size_t ep = 0; ep < options.num_episodes; ++ep) {
    if (options.max_env_steps > 0 && agent.total_steps() >= options.max_env_steps) break;
    const std::uint64_t episode_seed = derive_seed(seed, ep);
    EpisodeRecord rec;
    rec.episode = ep;
    rec.train_return = agent.train_episode(env, episode_seed, ep).train_return;
    rec.total_steps = agent.total_steps();
    if (options.eval_interval > 0 && (ep + 1) % options.eval_interval == 0) {
      rec.eval_return = evaluate(agent, env, options.eval_episodes, derive_seed(episode_seed, 0xe7a1));
    }
    if (on_episode) on_episode(agent, rec);
    curve.push_back(rec);
  }
  return curve;
}

LearningCurve train(const std::string& agent_kind, const std::string& env_kind, const AgentConfig& config,
                    const TrainOptions& options, std::uint64_t seed) {
  EnvironmentPtr env = make_environment(env_kind);
  AgentPtr agent = make_agent(agent_kind, *env, config, seed);
  return train(*agent, *env, options, seed);
}

}  // namespace amtd
