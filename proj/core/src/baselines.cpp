#include "amtd/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "amtd/errors.hpp"
#include "amtd/returns.hpp"

namespace amtd {

void TransitionReplay::push(Transition t) {
  items_.push_back(std::move(t));
  if (items_.size() > capacity_) items_.pop_front();
}

std::vector<const Transition*> TransitionReplay::sample(std::size_t batch_size, Rng& rng) const {
  if (items_.empty()) throw UsageError("replay is empty");
  std::vector<const Transition*> out(batch_size);
  for (auto& p : out) p = &items_[uniform_index(rng, items_.size())];
  return out;
}

namespace {

Matrix state_columns(const std::vector<const Transition*>& batch, std::size_t rows, bool next) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    m.col(static_cast<Eigen::Index>(b)) = next ? batch[b]->next_state : batch[b]->state;
  }
  return m;
}

void check_observation(const Observation& s, std::size_t size) {
  if (static_cast<std::size_t>(s.size()) != size) throw DimensionError("observation has the wrong size");
}

Action noisy_action(const ContinuousActorCritic& nets, const ActionSpace& space, const Observation& s, double noise,
                    bool explore, Rng& rng) {
  Vector a = nets.actions(nets.actor, Matrix(s)).col(0);
  if (explore && noise > 0.0) {
    for (Eigen::Index d = 0; d < a.size(); ++d) {
      a[d] = std::clamp(a[d] + normal(rng, 0.0, noise * nets.half_range[d]), space.low()[d], space.high()[d]);
    }
  }
  return Action::continuous(std::move(a));
}

}  // namespace

VanillaActorCritic::VanillaActorCritic(std::size_t observation_size, std::size_t num_actions, AgentConfig config,
                                       std::uint64_t seed)
    : cfg_(std::move(config)),
      obs_size_(observation_size),
      num_actions_(num_actions),
      rng_(derive_seed(seed, 1)),
      replay_(cfg_.replay_capacity) {
  Rng init(derive_seed(seed, 0));
  nets_ = DiscreteActorCritic::create(obs_size_, num_actions_, cfg_, init);
}

Action VanillaActorCritic::act(const Observation& state, bool explore) {
  check_observation(state, obs_size_);
  const Vector pi = nets_.actor.forward(Matrix(state)).col(0);
  return Action::discrete(explore ? detail::sample_categorical(pi, rng_) : detail::argmax(pi));
}

EpisodeResult VanillaActorCritic::train_episode(Environment& env, std::uint64_t env_seed, std::size_t) {
  EpisodeResult r;
  std::size_t collected = 0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  EnvState s = env.reset(env_seed);
  while (!s.done) {
    Action a;
    if (!cfg_.on_policy && total_steps_ < cfg_.warmup_steps) {
      a = Action::discrete(uniform_index(rng_, num_actions_));
    } else {
      a = act(s.observation, true);
    }
    Transition t = env.step(a);
    ++total_steps_;
    ++r.steps;
    r.train_return += t.reward;
    if (cfg_.on_policy) {
      const auto d = update_on_batch({&t});
      critic_loss += d.critic_loss;
      actor_loss += d.actor_loss;
      ++r.updates.iterations;
    } else {
      replay_.push(std::move(t));
      ++collected;
    }
    s = env.state();
  }
  if (!cfg_.on_policy && total_steps_ >= cfg_.warmup_steps) {
    for (std::size_t i = 0; i < collected; ++i) {
      const auto d = update_on_batch(replay_.sample(cfg_.batch_size, rng_));
      critic_loss += d.critic_loss;
      actor_loss += d.actor_loss;
      ++r.updates.iterations;
    }
  }
  if (r.updates.iterations > 0) {
    r.updates.ready = true;
    r.updates.actor_updated = true;
    r.updates.critic_loss = critic_loss / static_cast<double>(r.updates.iterations);
    r.updates.actor_loss = actor_loss / static_cast<double>(r.updates.iterations);
  }
  return r;
}

UpdateDiagnostics VanillaActorCritic::update_on_batch(const std::vector<const Transition*>& batch) {
  if (batch.empty()) throw UsageError("update batch is empty");
  const Vector v = nets_.expected_values(state_columns(batch, obs_size_, true), true);
  Vector y(static_cast<Eigen::Index>(batch.size()));
  std::vector<std::size_t> actions(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Transition& t = *batch[b];
    const auto c = static_cast<Eigen::Index>(b);
    y[c] = t.terminal ? t.reward : t.reward + cfg_.gamma * v[c];
    actions[b] = t.action.index();
  }
  const auto step = nets_.step(state_columns(batch, obs_size_, false), actions, y, cfg_.tau);
  UpdateDiagnostics d;
  d.ready = true;
  d.iterations = 1;
  d.critic_loss = step.critic_loss;
  d.actor_loss = step.actor_loss;
  d.actor_updated = true;
  d.gate_on_fraction = 1.0;
  return d;
}

std::vector<double> VanillaActorCritic::parameters() const { return nets_.parameters(); }

Reinforce::Reinforce(std::size_t observation_size, std::size_t num_actions, AgentConfig config, std::uint64_t seed)
    : cfg_(std::move(config)), obs_size_(observation_size), num_actions_(num_actions), rng_(derive_seed(seed, 1)) {
  Rng init(derive_seed(seed, 0));
  const auto hidden = cfg_.hidden_for(true);
  actor_ = detail::make_net(obs_size_, hidden, num_actions_, cfg_.hidden_activation, Activation::softmax, init);
  baseline_ = detail::make_net(obs_size_, hidden, 1, cfg_.hidden_activation, Activation::identity, init);
  actor_opt_ = Optimizer(cfg_.optimizer, cfg_.actor_lr, actor_.num_params());
  baseline_opt_ = Optimizer(cfg_.optimizer, cfg_.critic_lr, baseline_.num_params());
}

Vector Reinforce::policy(const Observation& s) const {
  check_observation(s, obs_size_);
  return actor_.forward(Matrix(s)).col(0);
}

Action Reinforce::act(const Observation& state, bool explore) {
  const Vector pi = policy(state);
  return Action::discrete(explore ? detail::sample_categorical(pi, rng_) : detail::argmax(pi));
}

EpisodeResult Reinforce::train_episode(Environment& env, std::uint64_t env_seed, std::size_t) {
  EpisodeResult r;
  std::vector<Observation> states;
  std::vector<std::size_t> actions;
  std::vector<double> rewards;
  EnvState s = env.reset(env_seed);
  while (!s.done) {
    const Action a = act(s.observation, true);
    const Transition t = env.step(a);
    ++total_steps_;
    states.push_back(t.state);
    actions.push_back(a.index());
    rewards.push_back(t.reward);
    r.train_return += t.reward;
    s = env.state();
  }
  r.steps = rewards.size();
  const auto n = static_cast<Eigen::Index>(rewards.size());
  Vector g(n);
  double running = 0.0;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    running = rewards[static_cast<std::size_t>(t)] + cfg_.gamma * running;
    g[t] = running;
  }
  Matrix x(static_cast<Eigen::Index>(obs_size_), n);
  for (Eigen::Index t = 0; t < n; ++t) x.col(t) = states[static_cast<std::size_t>(t)];

  GradTape actor_tape;
  GradTape baseline_tape;
  const Matrix pi = actor_.forward(x, actor_tape);
  const Matrix v = baseline_.forward(x, baseline_tape);
  const double inv = 1.0 / static_cast<double>(n);
  Matrix dlogits(pi.rows(), n);
  Matrix dv(1, n);
  double actor_loss = 0.0;
  double baseline_loss = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto a = static_cast<Eigen::Index>(actions[static_cast<std::size_t>(t)]);
    const double adv = g[t] - v(0, t);
    actor_loss -= adv * std::log(std::max(pi(a, t), 1e-300)) * inv;
    dlogits.col(t) = adv * pi.col(t) * inv;
    dlogits(a, t) -= adv * inv;
    baseline_loss += adv * adv * inv;
    dv(0, t) = -2.0 * adv * inv;
  }
  std::vector<double> grad(actor_.num_params(), 0.0);
  actor_.backward(actor_tape, dlogits, grad, nullptr, GradientOf::output_logits);
  actor_opt_.step(actor_.params(), grad);
  grad.assign(baseline_.num_params(), 0.0);
  baseline_.backward(baseline_tape, dv, grad);
  baseline_opt_.step(baseline_.params(), grad);

  r.updates.ready = true;
  r.updates.iterations = 1;
  r.updates.actor_updated = true;
  r.updates.actor_loss = actor_loss;
  r.updates.critic_loss = baseline_loss;
  return r;
}

std::vector<double> Reinforce::parameters() const {
  std::vector<double> out(actor_.params().begin(), actor_.params().end());
  out.insert(out.end(), baseline_.params().begin(), baseline_.params().end());
  return out;
}

Dqn::Dqn(std::size_t observation_size, std::size_t num_actions, AgentConfig config, std::uint64_t seed)
    : cfg_(std::move(config)),
      obs_size_(observation_size),
      num_actions_(num_actions),
      rng_(derive_seed(seed, 1)),
      replay_(cfg_.replay_capacity) {
  Rng init(derive_seed(seed, 0));
  q_ = detail::make_net(obs_size_, cfg_.hidden_for(true), num_actions_, cfg_.hidden_activation, Activation::identity,
                        init);
  q_target_ = q_;
  opt_ = Optimizer(cfg_.optimizer, cfg_.critic_lr, q_.num_params());
  grad_.assign(q_.num_params(), 0.0);
}

double Dqn::epsilon() const {
  if (cfg_.epsilon_decay_steps == 0) return cfg_.epsilon_end;
  const double frac =
      std::min(1.0, static_cast<double>(total_steps_) / static_cast<double>(cfg_.epsilon_decay_steps));
  return cfg_.epsilon_start + frac * (cfg_.epsilon_end - cfg_.epsilon_start);
}

Action Dqn::act(const Observation& state, bool explore) {
  check_observation(state, obs_size_);
  if (explore && uniform(rng_, 0.0, 1.0) < epsilon()) return Action::discrete(uniform_index(rng_, num_actions_));
  return Action::discrete(detail::argmax(q_.forward(Matrix(state)).col(0)));
}

EpisodeResult Dqn::train_episode(Environment& env, std::uint64_t env_seed, std::size_t) {
  EpisodeResult r;
  double loss = 0.0;
  EnvState s = env.reset(env_seed);
  while (!s.done) {
    Transition t = env.step(act(s.observation, true));
    ++total_steps_;
    ++r.steps;
    r.train_return += t.reward;
    replay_.push(std::move(t));
    if (total_steps_ >= cfg_.warmup_steps) {
      loss += update_on_batch(replay_.sample(cfg_.batch_size, rng_)).critic_loss;
      ++r.updates.iterations;
    }
    s = env.state();
  }
  if (r.updates.iterations > 0) {
    r.updates.ready = true;
    r.updates.critic_loss = loss / static_cast<double>(r.updates.iterations);
  }
  return r;
}

UpdateDiagnostics Dqn::update_on_batch(const std::vector<const Transition*>& batch) {
  if (batch.empty()) throw UsageError("update batch is empty");
  const Matrix q_next = q_target_.forward(state_columns(batch, obs_size_, true));
  GradTape tape;
  const Matrix q = q_.forward(state_columns(batch, obs_size_, false), tape);
  const double n = static_cast<double>(batch.size());
  Matrix dq = Matrix::Zero(q.rows(), q.cols());
  UpdateDiagnostics d;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Transition& t = *batch[b];
    const auto c = static_cast<Eigen::Index>(b);
    const double y = t.terminal ? t.reward : t.reward + cfg_.gamma * q_next.col(c).maxCoeff();
    const auto a = static_cast<Eigen::Index>(t.action.index());
    const double diff = q(a, c) - y;
    d.critic_loss += diff * diff / n;
    dq(a, c) = 2.0 * diff / n;
  }
  std::fill(grad_.begin(), grad_.end(), 0.0);
  q_.backward(tape, dq, grad_);
  opt_.step(q_.params(), grad_);
  soft_update(q_target_, q_, cfg_.tau);
  d.ready = true;
  d.iterations = 1;
  return d;
}

std::vector<double> Dqn::parameters() const { return {q_.params().begin(), q_.params().end()}; }

DeterministicAgent::DeterministicAgent(Variant variant, std::size_t observation_size, const ActionSpace& space,
                                       AgentConfig config, std::uint64_t seed)
    : variant_(variant),
      cfg_(std::move(config)),
      obs_size_(observation_size),
      space_(space),
      rng_(derive_seed(seed, 1)),
      replay_(cfg_.replay_capacity) {
  Rng init(derive_seed(seed, 0));
  nets_ = ContinuousActorCritic::create(obs_size_, space_, cfg_, variant_ == Variant::td3, init);
}

Action DeterministicAgent::act(const Observation& state, bool explore) {
  check_observation(state, obs_size_);
  return noisy_action(nets_, space_, state, cfg_.exploration_noise, explore, rng_);
}

EpisodeResult DeterministicAgent::train_episode(Environment& env, std::uint64_t env_seed, std::size_t) {
  EpisodeResult r;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  EnvState s = env.reset(env_seed);
  while (!s.done) {
    const Action a = total_steps_ < cfg_.warmup_steps ? space_.sample(rng_) : act(s.observation, true);
    Transition t = env.step(a);
    ++total_steps_;
    ++r.steps;
    r.train_return += t.reward;
    replay_.push(std::move(t));
    if (total_steps_ >= cfg_.warmup_steps) {
      const auto d = update_on_batch(replay_.sample(cfg_.batch_size, rng_));
      critic_loss += d.critic_loss;
      actor_loss += d.actor_loss;
      r.updates.actor_updated = r.updates.actor_updated || d.actor_updated;
      ++r.updates.iterations;
    }
    s = env.state();
  }
  if (r.updates.iterations > 0) {
    r.updates.ready = true;
    r.updates.critic_loss = critic_loss / static_cast<double>(r.updates.iterations);
    r.updates.actor_loss = actor_loss / static_cast<double>(r.updates.iterations);
  }
  return r;
}

Vector DeterministicAgent::critic_targets(const std::vector<const Transition*>& batch) {
  const Matrix next = state_columns(batch, obs_size_, true);
  std::vector<bool> use(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) use[b] = !batch[b]->terminal;
  const bool td3 = variant_ == Variant::td3;
  const Matrix a_next =
      nets_.smoothed_target_actions(next, use, td3 ? cfg_.target_noise : 0.0, cfg_.target_noise_clip, rng_);
  const Vector q1 = nets_.q_values(nets_.critic1_target, next, a_next);
  Vector v = q1;
  if (td3) v = q1.cwiseMin(nets_.q_values(nets_.critic2_target, next, a_next));
  Vector y(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto c = static_cast<Eigen::Index>(b);
    y[c] = batch[b]->terminal ? batch[b]->reward : batch[b]->reward + cfg_.gamma * v[c];
  }
  return y;
}

UpdateDiagnostics DeterministicAgent::update_on_batch(const std::vector<const Transition*>& batch) {
  if (batch.empty()) throw UsageError("update batch is empty");
  const Vector y = critic_targets(batch);
  const Matrix states = state_columns(batch, obs_size_, false);
  Matrix actions(static_cast<Eigen::Index>(space_.feature_size()), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) actions.col(static_cast<Eigen::Index>(b)) = batch[b]->action.values();
  UpdateDiagnostics d;
  d.ready = true;
  d.iterations = 1;
  d.gate_on_fraction = 1.0;
  d.critic_loss = nets_.critic_step(states, actions, y);
  ++updates_;
  const std::size_t delay = variant_ == Variant::td3 ? cfg_.policy_delay : 1;
  if (updates_ % delay == 0) {
    d.actor_loss = nets_.actor_step(states);
    nets_.update_targets(cfg_.tau);
    d.actor_updated = true;
  }
  return d;
}

std::vector<double> DeterministicAgent::parameters() const { return nets_.parameters(); }

}  // namespace amtd
