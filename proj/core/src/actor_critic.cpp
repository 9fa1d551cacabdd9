#include "amtd/actor_critic.hpp"

#include <algorithm>
#include <cmath>

#include "amtd/errors.hpp"

namespace amtd {

namespace {

void append(std::vector<double>& out, std::span<const double> values) { out.insert(out.end(), values.begin(), values.end()); }

void zero(std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); }

}  // namespace

DiscreteActorCritic DiscreteActorCritic::create(std::size_t observation_size, std::size_t num_actions,
                                                const AgentConfig& config, Rng& init_rng) {
  const auto hidden = config.hidden_for(true);
  DiscreteActorCritic ac;
  ac.actor = detail::make_net(observation_size, hidden, num_actions, config.hidden_activation, Activation::softmax,
                              init_rng);
  ac.critic = detail::make_net(observation_size, hidden, num_actions, config.hidden_activation, Activation::identity,
                               init_rng);
  ac.actor_target = ac.actor;
  ac.critic_target = ac.critic;
  ac.actor_opt = Optimizer(config.optimizer, config.actor_lr, ac.actor.num_params());
  ac.critic_opt = Optimizer(config.optimizer, config.critic_lr, ac.critic.num_params());
  ac.actor_grad.assign(ac.actor.num_params(), 0.0);
  ac.critic_grad.assign(ac.critic.num_params(), 0.0);
  ac.policy_gradient = config.policy_gradient;
  ac.entropy_coef = config.entropy_coef;
  return ac;
}

Vector DiscreteActorCritic::expected_values(const Matrix& states, bool use_target) const {
  const Matrix pi = (use_target ? actor_target : actor).forward(states);
  const Matrix q = (use_target ? critic_target : critic).forward(states);
  return (pi.array() * q.array()).colwise().sum().transpose();
}

DiscreteActorCritic::StepResult DiscreteActorCritic::step(const Matrix& states, const std::vector<std::size_t>& actions,
                                                          const Vector& targets, double tau) {
  const Eigen::Index batch = states.cols();
  if (static_cast<std::size_t>(batch) != actions.size() || targets.size() != batch || batch == 0) {
    throw DimensionError("states, actions and targets differ in batch size");
  }
  StepResult r;
  GradTape critic_tape;
  GradTape actor_tape;
  r.q = critic.forward(states, critic_tape);
  r.pi = actor.forward(states, actor_tape);
  const double n = static_cast<double>(batch);

  Matrix dq = Matrix::Zero(r.q.rows(), batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto a = static_cast<Eigen::Index>(actions[static_cast<std::size_t>(b)]);
    const double diff = r.q(a, b) - targets[b];
    r.critic_loss += diff * diff;
    dq(a, b) = 2.0 * diff / n;
  }
  r.critic_loss /= n;

  const Vector v = (r.pi.array() * r.q.array()).colwise().sum().transpose();
  const Matrix adv = r.q.rowwise() - v.transpose();
  const Matrix log_pi = r.pi.array().max(1e-300).log().matrix();
  Matrix dlogits(r.pi.rows(), batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const double entropy = -r.pi.col(b).dot(log_pi.col(b));
    if (policy_gradient == PolicyGradient::expected) {
      dlogits.col(b) = -(r.pi.col(b).array() * adv.col(b).array()).matrix();
      r.actor_loss -= v[b];
    } else {
      const auto a = static_cast<Eigen::Index>(actions[static_cast<std::size_t>(b)]);
      dlogits.col(b) = adv(a, b) * r.pi.col(b);
      dlogits(a, b) -= adv(a, b);
      r.actor_loss -= adv(a, b) * log_pi(a, b);
    }
    dlogits.col(b) += entropy_coef * (r.pi.col(b).array() * (log_pi.col(b).array() + entropy)).matrix();
    r.actor_loss -= entropy_coef * entropy;
  }
  dlogits /= n;
  r.actor_loss /= n;

  zero(critic_grad);
  critic.backward(critic_tape, dq, critic_grad);
  critic_opt.step(critic.params(), critic_grad);
  zero(actor_grad);
  actor.backward(actor_tape, dlogits, actor_grad, nullptr, GradientOf::output_logits);
  actor_opt.step(actor.params(), actor_grad);
  soft_update(actor_target, actor, tau);
  soft_update(critic_target, critic, tau);
  return r;
}

std::vector<double> DiscreteActorCritic::parameters() const {
  std::vector<double> out;
  append(out, actor.params());
  append(out, critic.params());
  return out;
}

ContinuousActorCritic ContinuousActorCritic::create(std::size_t observation_size, const ActionSpace& space,
                                                    const AgentConfig& config, bool twin, Rng& init_rng) {
  if (space.is_discrete()) throw UsageError("continuous actor-critic needs a box action space");
  const auto hidden = config.hidden_for(false);
  const std::size_t adim = space.feature_size();
  ContinuousActorCritic ac;
  ac.twin = twin;
  ac.center = (space.low() + space.high()) / 2.0;
  ac.half_range = (space.high() - space.low()) / 2.0;
  ac.actor = detail::make_net(observation_size, hidden, adim, config.hidden_activation, Activation::tanh, init_rng);
  ac.critic1 = detail::make_net(observation_size + adim, hidden, 1, config.hidden_activation, Activation::identity,
                                init_rng);
  if (twin) {
    ac.critic2 = detail::make_net(observation_size + adim, hidden, 1, config.hidden_activation, Activation::identity,
                                  init_rng);
  }
  ac.actor_target = ac.actor;
  ac.critic1_target = ac.critic1;
  ac.critic2_target = ac.critic2;
  ac.actor_opt = Optimizer(config.optimizer, config.actor_lr, ac.actor.num_params());
  ac.critic1_opt = Optimizer(config.optimizer, config.critic_lr, ac.critic1.num_params());
  ac.actor_grad.assign(ac.actor.num_params(), 0.0);
  ac.critic1_grad.assign(ac.critic1.num_params(), 0.0);
  if (twin) {
    ac.critic2_opt = Optimizer(config.optimizer, config.critic_lr, ac.critic2.num_params());
    ac.critic2_grad.assign(ac.critic2.num_params(), 0.0);
  }
  return ac;
}

Matrix ContinuousActorCritic::actions(const Network& policy, const Matrix& states) const {
  const Matrix y = policy.forward(states);
  return ((y.array().colwise() * half_range.array()).colwise() + center.array()).matrix();
}

Matrix ContinuousActorCritic::critic_input(const Matrix& states, const Matrix& acts) const {
  Matrix x(states.rows() + acts.rows(), states.cols());
  x.topRows(states.rows()) = states;
  x.bottomRows(acts.rows()) = acts;
  return x;
}

Vector ContinuousActorCritic::q_values(const Network& net, const Matrix& states, const Matrix& acts) const {
  return net.forward(critic_input(states, acts)).row(0).transpose();
}

Matrix ContinuousActorCritic::smoothed_target_actions(const Matrix& states, const std::vector<bool>& use,
                                                      double noise_std, double noise_clip, Rng& rng) const {
  Matrix a = actions(actor_target, states);
  if (noise_std <= 0.0) return a;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    if (!use[static_cast<std::size_t>(c)]) continue;
    for (Eigen::Index d = 0; d < a.rows(); ++d) {
      const double h = half_range[d];
      const double eps = std::clamp(normal(rng, 0.0, noise_std * h), -noise_clip * h, noise_clip * h);
      a(d, c) = std::clamp(a(d, c) + eps, center[d] - h, center[d] + h);
    }
  }
  return a;
}

double ContinuousActorCritic::critic_step(const Matrix& states, const Matrix& acts, const Vector& targets) {
  const Matrix x = critic_input(states, acts);
  const double n = static_cast<double>(x.cols());
  double total = 0.0;
  auto regress = [&](Network& net, Optimizer& opt, std::vector<double>& grad) {
    GradTape tape;
    const Matrix q = net.forward(x, tape);
    const Matrix diff = q - targets.transpose();
    total += diff.squaredNorm() / n;
    zero(grad);
    net.backward(tape, 2.0 * diff / n, grad);
    opt.step(net.params(), grad);
  };
  regress(critic1, critic1_opt, critic1_grad);
  if (twin) regress(critic2, critic2_opt, critic2_grad);
  return total / (twin ? 2.0 : 1.0);
}

double ContinuousActorCritic::actor_step(const Matrix& states) {
  const Eigen::Index batch = states.cols();
  GradTape actor_tape;
  const Matrix y = actor.forward(states, actor_tape);
  const Matrix a = ((y.array().colwise() * half_range.array()).colwise() + center.array()).matrix();
  GradTape critic_tape;
  const Matrix q = critic1.forward(critic_input(states, a), critic_tape);
  std::vector<double> discard(critic1.num_params(), 0.0);
  Matrix dx;
  critic1.backward(critic_tape, Matrix::Constant(1, batch, -1.0 / static_cast<double>(batch)), discard, &dx);
  const Matrix dy = (dx.bottomRows(a.rows()).array().colwise() * half_range.array()).matrix();
  zero(actor_grad);
  actor.backward(actor_tape, dy, actor_grad);
  actor_opt.step(actor.params(), actor_grad);
  return -q.mean();
}

void ContinuousActorCritic::update_targets(double tau) {
  soft_update(actor_target, actor, tau);
  soft_update(critic1_target, critic1, tau);
  if (twin) soft_update(critic2_target, critic2, tau);
}

std::vector<double> ContinuousActorCritic::parameters() const {
  std::vector<double> out;
  append(out, actor.params());
  append(out, critic1.params());
  if (twin) append(out, critic2.params());
  return out;
}

}  // namespace amtd
