#include <algorithm>
#include <cmath>

#include "active_common.hpp"
#include "amtd/active_agents.hpp"
#include "amtd/errors.hpp"

namespace amtd {

BranchPlan BranchPlan::build(const std::vector<LookaheadWindow>& batch, std::size_t l, double gamma) {
  BranchPlan plan;
  plan.windows.resize(batch.size());
  for (std::size_t w = 0; w < batch.size(); ++w) {
    const LookaheadWindow& window = batch[w];
    const std::size_t m = window.lookaheads();
    const std::size_t branches = std::min(l, m + 1);
    auto& out = plan.windows[w];
    out.reserve(branches);
    double partial = 0.0;
    double discount = 1.0;
    for (std::size_t j = 1; j <= branches; ++j) {
      const SelectedSample& seg = *window.samples[j - 1];
      partial += discount * seg.accumulated_reward;
      discount *= std::pow(gamma, static_cast<double>(seg.segment_steps));
      Branch b;
      b.partial_return = partial;
      b.discount = discount;
      b.terminal = seg.terminal;
      b.bootstrap_state = &seg.next_state;
      b.context = window.samples[std::min(j, m)];
      out.push_back(b);
    }
  }
  return plan;
}

std::vector<GateVector> infer_window_gates(const ContextClassifier* classifier, const ActionSpace& space,
                                           const std::vector<LookaheadWindow>& batch, const BranchPlan& plan,
                                           bool force_on) {
  std::vector<GateVector> gates(batch.size());
  std::size_t columns = 0;
  for (std::size_t w = 0; w < batch.size(); ++w) {
    const std::size_t branches = plan.windows[w].size();
    gates[w] = GateVector::all_on(branches);
    if (branches > 1) columns += branches;
  }
  if (force_on || classifier == nullptr || columns == 0) return gates;

  const std::size_t n = space.num_actions();
  const bool context = classifier->config().context_features;
  Matrix inputs(static_cast<Eigen::Index>(classifier->input_size()), static_cast<Eigen::Index>(columns));
  Eigen::Index col = 0;
  for (std::size_t w = 0; w < batch.size(); ++w) {
    const auto& branches = plan.windows[w];
    if (branches.size() < 2) continue;
    const SelectedSample& anchor = batch[w].anchor();
    const Vector anchor_action = anchor.action.features(n);
    inputs.col(col++) = classifier->make_input(anchor.state, anchor_action);
    for (std::size_t j = 1; j < branches.size(); ++j) {
      const SelectedSample& ahead = *branches[j].context;
      const Vector ahead_action = ahead.action.features(n);
      if (context) {
        const double gap = std::abs(static_cast<double>(ahead.step_index) - static_cast<double>(anchor.step_index));
        inputs.col(col++) = classifier->make_input(ahead.state, ahead_action, gap, (anchor_action - ahead_action).norm());
      } else {
        inputs.col(col++) = classifier->make_input(ahead.state, ahead_action);
      }
    }
  }
  const std::vector<int> f = classifier->predict_batch(inputs);
  std::size_t k = 0;
  for (std::size_t w = 0; w < batch.size(); ++w) {
    const std::size_t branches = plan.windows[w].size();
    if (branches < 2) continue;
    const int f_anchor = f[k++];
    for (std::size_t j = 1; j < branches; ++j) gates[w].bits[j] = f[k++] == f_anchor ? 1 : 0;
  }
  return gates;
}

namespace detail {

ClassifierConfig classifier_config(const AgentConfig& cfg, bool discrete) {
  ClassifierConfig cc;
  cc.hidden = cfg.hidden_for(discrete);
  cc.hidden_activation = cfg.hidden_activation;
  cc.optimizer = cfg.optimizer;
  cc.learning_rate = cfg.effective_classifier_lr();
  cc.buffer_capacity = cfg.classifier_buffer;
  cc.context_features = cfg.context_features;
  return cc;
}

void DiagnosticsAccumulator::add(const UpdateDiagnostics& d) {
  total.ready = true;
  ++total.iterations;
  total.critic_loss += d.critic_loss;
  total.actor_loss += d.actor_loss;
  total.classifier_loss += d.classifier_loss;
  total.gate_on_fraction += d.gate_on_fraction;
  total.actor_updated = total.actor_updated || d.actor_updated;
  for (std::size_t j = 0; j < branch_on.size(); ++j) {
    branch_on[j] += d.branch_gate_on[j] * static_cast<double>(d.branch_windows[j]);
    total.branch_windows[j] += d.branch_windows[j];
  }
}

UpdateDiagnostics DiagnosticsAccumulator::finish() {
  if (total.iterations > 0) {
    const double n = static_cast<double>(total.iterations);
    total.critic_loss /= n;
    total.actor_loss /= n;
    total.classifier_loss /= n;
    total.gate_on_fraction /= n;
  }
  for (std::size_t j = 0; j < branch_on.size(); ++j) {
    total.branch_gate_on[j] =
        total.branch_windows[j] > 0 ? branch_on[j] / static_cast<double>(total.branch_windows[j]) : 0.0;
  }
  return total;
}
// Gated targets for every window; fills the gate statistics of `diag`.
Vector gated_targets(const BranchPlan& plan, const std::vector<GateVector>& gates, const Vector& bootstrap,
                     const ReturnWeights& weights, std::size_t l, UpdateDiagnostics& diag) {
  Vector y(static_cast<Eigen::Index>(plan.windows.size()));
  diag.branch_gate_on.assign(l, 0.0);
  diag.branch_windows.assign(l, 0);
  std::vector<double> values(l);
  Eigen::Index k = 0;
  double on_fraction = 0.0;
  for (std::size_t w = 0; w < plan.windows.size(); ++w) {
    const auto& branches = plan.windows[w];
    for (std::size_t j = 0; j < branches.size(); ++j) {
      const auto& b = branches[j];
      const double v = bootstrap[k++];
      values[j] = b.terminal ? b.partial_return : b.partial_return + b.discount * v;
      diag.branch_gate_on[j] += gates[w].bits[j];
      ++diag.branch_windows[j];
    }
    const std::size_t nb = branches.size();
    y[static_cast<Eigen::Index>(w)] = gated_return(std::span<const double>(values.data(), nb),
                                                   std::span<const double>(weights.lambdas.data(), nb),
                                                   std::span<const std::uint8_t>(gates[w].bits.data(), nb));
    on_fraction += static_cast<double>(gates[w].count_on()) / static_cast<double>(l);
  }
  for (std::size_t j = 0; j < l; ++j) {
    if (diag.branch_windows[j] > 0) diag.branch_gate_on[j] /= static_cast<double>(diag.branch_windows[j]);
  }
  diag.gate_on_fraction = on_fraction / static_cast<double>(plan.windows.size());
  return y;
}

}  // namespace detail

DiscreteActiveAgent::DiscreteActiveAgent(std::size_t observation_size, std::size_t num_actions, AgentConfig config,
                                         std::uint64_t seed)
    : cfg_(std::move(config)),
      obs_size_(observation_size),
      num_actions_(num_actions),
      rng_(derive_seed(seed, 1)),
      buffer_(cfg_.replay_capacity),
      weights_(ReturnWeights::geometric(cfg_.lookahead, cfg_.lambda_base)) {
  Rng init(derive_seed(seed, 0));
  nets_ = DiscreteActorCritic::create(obs_size_, num_actions_, cfg_, init);
  classifier_.emplace(obs_size_, num_actions_, detail::classifier_config(cfg_, true), init);
}

Vector DiscreteActiveAgent::policy(const Observation& s) const { return nets_.actor.forward(Matrix(s)).col(0); }

double DiscreteActiveAgent::state_value(const Observation& s) const { return nets_.expected_values(Matrix(s), false)[0]; }

Action DiscreteActiveAgent::act(const Observation& state, bool explore) {
  if (static_cast<std::size_t>(state.size()) != obs_size_) throw DimensionError("observation has the wrong size");
  const Vector pi = policy(state);
  return Action::discrete(explore ? detail::sample_categorical(pi, rng_) : detail::argmax(pi));
}

double DiscreteActiveAgent::td_error(const Transition& t) const {
  const double v_next = t.terminal ? 0.0 : state_value(t.next_state);
  return amtd::td_error(t.reward, v_next, state_value(t.state), cfg_.gamma);
}

SelectionScore DiscreteActiveAgent::score(const Transition& t) const {
  const Vector pi = policy(t.state);
  return score_discrete(td_error(t), std::span<const double>(pi.data(), static_cast<std::size_t>(pi.size())),
                        cfg_.beta, t.step_index);
}

ActiveRollout DiscreteActiveAgent::run_episode_active(Environment& env, std::uint64_t env_seed, std::size_t interval) {
  ChunkSelector selector(interval, cfg_.gamma);
  ActiveRollout out;
  EnvState s = env.reset(env_seed);
  while (!s.done) {
    Action a;
    if (behavior_) {
      a = behavior_(s.observation, rng_);
    } else if (total_steps_ < cfg_.warmup_steps) {
      a = Action::discrete(uniform_index(rng_, num_actions_));
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

EpisodeResult DiscreteActiveAgent::train_episode(Environment& env, std::uint64_t env_seed, std::size_t episode) {
  const std::size_t interval = current_interval(cfg_.schedule, episode);
  ActiveRollout roll = run_episode_active(env, env_seed, interval);
  buffer_.push_episode(roll.samples);
  EpisodeResult r;
  r.train_return = roll.episode_return;
  r.steps = roll.steps;
  if (total_steps_ >= cfg_.warmup_steps) r.updates = update_adaptive(roll.samples.size());
  return r;
}

UpdateDiagnostics DiscreteActiveAgent::update_adaptive(std::size_t iterations) {
  detail::DiagnosticsAccumulator acc(cfg_.lookahead);
  for (std::size_t it = 0; it < iterations; ++it) {
    auto batch = buffer_.sample_windows(cfg_.batch_size, cfg_.lookahead, rng_);
    if (!batch) break;
    acc.add(update_on_batch(*batch));
  }
  return acc.finish();
}

std::vector<GateVector> DiscreteActiveAgent::infer_gates(const std::vector<LookaheadWindow>& batch,
                                                         const BranchPlan& plan) const {
  return infer_window_gates(&*classifier_, ActionSpace::discrete(num_actions_), batch, plan, cfg_.force_gates_on);
}

UpdateDiagnostics DiscreteActiveAgent::update_on_batch(const std::vector<LookaheadWindow>& batch) {
  if (batch.empty()) throw UsageError("update batch is empty");
  UpdateDiagnostics diag;
  diag.ready = true;
  diag.iterations = 1;
  const BranchPlan plan = BranchPlan::build(batch, cfg_.lookahead, cfg_.gamma);
  std::vector<const Observation*> boot;
  for (const auto& branches : plan.windows) {
    for (const auto& b : branches) boot.push_back(b.bootstrap_state);
  }
  const Vector v_boot = nets_.expected_values(detail::stack_columns(boot, obs_size_), true);
  const auto gates = infer_gates(batch, plan);
  const Vector y = detail::gated_targets(plan, gates, v_boot, weights_, cfg_.lookahead, diag);

  std::vector<const Observation*> anchors(batch.size());
  std::vector<std::size_t> actions(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    anchors[b] = &batch[b].anchor().state;
    actions[b] = batch[b].anchor().action.index();
  }
  const Matrix states = detail::stack_columns(anchors, obs_size_);
  const auto step = nets_.step(states, actions, y, cfg_.tau);
  diag.critic_loss = step.critic_loss;
  diag.actor_loss = step.actor_loss;
  diag.actor_updated = true;
  if (cfg_.lookahead == 1) return diag;

  Matrix inputs(static_cast<Eigen::Index>(classifier_->input_size()), static_cast<Eigen::Index>(batch.size()));
  std::vector<int> labels(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto c = static_cast<Eigen::Index>(b);
    const auto a = static_cast<Eigen::Index>(actions[b]);
    labels[b] = make_label(step.q(a, c), step.pi.col(c).dot(step.q.col(c)));
    inputs.col(c) = classifier_->make_input(*anchors[b], batch[b].anchor().action.features(num_actions_));
  }
  diag.classifier_loss = classifier_->train_step(inputs, labels);
  return diag;
}

std::vector<double> DiscreteActiveAgent::parameters() const {
  std::vector<double> out = nets_.parameters();
  const auto clf = classifier_->net().params();
  out.insert(out.end(), clf.begin(), clf.end());
  return out;
}

}  // namespace amtd
