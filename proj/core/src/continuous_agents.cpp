#include <algorithm>
#include <cmath>

#include "active_common.hpp"
#include "amtd/active_agents.hpp"
#include "amtd/errors.hpp"

namespace amtd {

namespace {

Matrix action_columns(const std::vector<LookaheadWindow>& batch, std::size_t adim) {
  Matrix a(static_cast<Eigen::Index>(adim), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) a.col(static_cast<Eigen::Index>(b)) = batch[b].anchor().action.values();
  return a;
}

}  // namespace

ContinuousActiveAgent::ContinuousActiveAgent(std::size_t observation_size, const ActionSpace& space,
                                             AgentConfig config, std::uint64_t seed)
    : cfg_(std::move(config)),
      obs_size_(observation_size),
      space_(space),
      rng_(derive_seed(seed, 1)),
      buffer_(cfg_.replay_capacity),
      weights_(ReturnWeights::geometric(cfg_.lookahead, cfg_.lambda_base)) {
  Rng init(derive_seed(seed, 0));
  nets_ = ContinuousActorCritic::create(obs_size_, space_, cfg_, true, init);
  classifier_.emplace(obs_size_, space_.feature_size(), detail::classifier_config(cfg_, false), init);
}

Vector ContinuousActiveAgent::mean_action(const Observation& s) const {
  if (static_cast<std::size_t>(s.size()) != obs_size_) throw DimensionError("observation has the wrong size");
  return nets_.actions(nets_.actor, Matrix(s)).col(0);
}

Action ContinuousActiveAgent::act(const Observation& state, bool explore) {
  Vector a = mean_action(state);
  if (explore && cfg_.exploration_noise > 0.0) {
    for (Eigen::Index d = 0; d < a.size(); ++d) {
      const double h = nets_.half_range[d];
      a[d] = std::clamp(a[d] + normal(rng_, 0.0, cfg_.exploration_noise * h), space_.low()[d], space_.high()[d]);
    }
  }
  return Action::continuous(std::move(a));
}

double ContinuousActiveAgent::td_error(const Transition& t) const {
  const Matrix s(t.state);
  const Matrix a(t.action.values());
  const double q = nets_.q_values(nets_.critic1, s, a)[0];
  double q_next = 0.0;
  if (!t.terminal) {
    const Matrix s_next(t.next_state);
    q_next = nets_.q_values(nets_.critic1, s_next, nets_.actions(nets_.actor, s_next))[0];
  }
  return amtd::td_error(t.reward, q_next, q, cfg_.gamma);
}

SelectionScore ContinuousActiveAgent::score(const Transition& t) const {
  const Vector sigma = (std::max(cfg_.exploration_noise, 1e-3) * nets_.half_range).eval();
  const double g = gaussian_log_policy_grad_norm_sq(nets_.actor, t.state, t.action.values(), nets_.center,
                                                    nets_.half_range, sigma);
  return score_continuous(td_error(t), g, cfg_.beta, t.step_index);
}

ActiveRollout ContinuousActiveAgent::run_episode_active(Environment& env, std::uint64_t env_seed,
                                                        std::size_t interval) {
  ChunkSelector selector(interval, cfg_.gamma);
  ActiveRollout out;
  EnvState s = env.reset(env_seed);
  while (!s.done) {
    Action a;
    if (behavior_) {
      a = behavior_(s.observation, rng_);
    } else if (total_steps_ < cfg_.warmup_steps) {
      a = space_.sample(rng_);
    } else {
      a = act(s.observation, true);
    }
    const Transition t = env.step(a);
    ++total_steps_;
    ++out.steps;
    out.episode_return += t.reward;
    selector.observe(t, interval > 1 ? score(t).value : 0.0);
    s = env.state();
  }
  out.samples = selector.finish();
  return out;
}

EpisodeResult ContinuousActiveAgent::train_episode(Environment& env, std::uint64_t env_seed, std::size_t episode) {
  const std::size_t interval = current_interval(cfg_.schedule, episode);
  ActiveRollout roll = run_episode_active(env, env_seed, interval);
  buffer_.push_episode(roll.samples);
  EpisodeResult r;
  r.train_return = roll.episode_return;
  r.steps = roll.steps;
  if (total_steps_ >= cfg_.warmup_steps) r.updates = update_adaptive(roll.samples.size());
  return r;
}

UpdateDiagnostics ContinuousActiveAgent::update_adaptive(std::size_t iterations) {
  detail::DiagnosticsAccumulator acc(cfg_.lookahead);
  for (std::size_t it = 0; it < iterations; ++it) {
    auto batch = buffer_.sample_windows(cfg_.batch_size, cfg_.lookahead, rng_);
    if (!batch) break;
    acc.add(update_on_batch(*batch));
  }
  return acc.finish();
}

std::vector<GateVector> ContinuousActiveAgent::infer_gates(const std::vector<LookaheadWindow>& batch,
                                                           const BranchPlan& plan) const {
  return infer_window_gates(&*classifier_, space_, batch, plan, cfg_.force_gates_on);
}

UpdateDiagnostics ContinuousActiveAgent::update_on_batch(const std::vector<LookaheadWindow>& batch) {
  if (batch.empty()) throw UsageError("update batch is empty");
  UpdateDiagnostics diag;
  diag.ready = true;
  diag.iterations = 1;
  const BranchPlan plan = BranchPlan::build(batch, cfg_.lookahead, cfg_.gamma);
  std::vector<const Observation*> boot;
  std::vector<bool> use;
  std::vector<bool> first;
  for (const auto& branches : plan.windows) {
    for (std::size_t j = 0; j < branches.size(); ++j) {
      boot.push_back(branches[j].bootstrap_state);
      use.push_back(!branches[j].terminal);
      first.push_back(j == 0);
    }
  }
  const Matrix boot_states = detail::stack_columns(boot, obs_size_);
  const Matrix boot_actions =
      nets_.smoothed_target_actions(boot_states, use, cfg_.target_noise, cfg_.target_noise_clip, rng_);
  const Vector q1 = nets_.q_values(nets_.critic1_target, boot_states, boot_actions);
  const Vector q2 = nets_.q_values(nets_.critic2_target, boot_states, boot_actions);
  Vector v(q1.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    v[k] = first[static_cast<std::size_t>(k)] ? std::min(q1[k], q2[k]) : 0.5 * (q1[k] + q2[k]);
  }
  const auto gates = infer_gates(batch, plan);
  const Vector y = detail::gated_targets(plan, gates, v, weights_, cfg_.lookahead, diag);

  std::vector<const Observation*> anchors(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) anchors[b] = &batch[b].anchor().state;
  const Matrix states = detail::stack_columns(anchors, obs_size_);
  const Matrix actions = action_columns(batch, space_.feature_size());
  const bool train_classifier = cfg_.lookahead > 1;
  Vector q_taken, q_policy;
  if (train_classifier) {
    q_taken = nets_.q_values(nets_.critic1, states, actions);
    q_policy = nets_.q_values(nets_.critic1, states, nets_.actions(nets_.actor, states));
  }

  diag.critic_loss = nets_.critic_step(states, actions, y);
  ++updates_;
  if (updates_ % cfg_.policy_delay == 0) {
    diag.actor_loss = nets_.actor_step(states);
    nets_.update_targets(cfg_.tau);
    diag.actor_updated = true;
  }
  if (!train_classifier) return diag;

  Matrix inputs(static_cast<Eigen::Index>(classifier_->input_size()), static_cast<Eigen::Index>(batch.size()));
  std::vector<int> labels(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto c = static_cast<Eigen::Index>(b);
    labels[b] = make_label(q_taken[c], q_policy[c]);
    inputs.col(c) = classifier_->make_input(*anchors[b], actions.col(c));
  }
  diag.classifier_loss = classifier_->train_step(inputs, labels);
  return diag;
}

std::vector<double> ContinuousActiveAgent::parameters() const {
  std::vector<double> out = nets_.parameters();
  const auto clf = classifier_->net().params();
  out.insert(out.end(), clf.begin(), clf.end());
  return out;
}

}  // namespace amtd
