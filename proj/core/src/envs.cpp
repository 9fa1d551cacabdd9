#include "amtd/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "amtd/errors.hpp"

namespace amtd {

namespace {

Vector filled(Eigen::Index n, double v) { return Vector::Constant(n, v); }

ObservationBounds symmetric(std::initializer_list<double> half_widths) {
  ObservationBounds b;
  b.high = Vector(static_cast<Eigen::Index>(half_widths.size()));
  Eigen::Index i = 0;
  for (double h : half_widths) b.high[i++] = h;
  b.low = -b.high;
  return b;
}

}  // namespace

// ---------------------------------------------------------------- CliffWalking

CliffWalking::CliffWalking(double reward_scale, std::size_t horizon)
    : scale_(reward_scale), horizon_(horizon) {
  if (horizon_ == 0) throw DomainError("horizon must be positive");
}

bool CliffWalking::is_cliff(std::size_t cell) { return cell > kStart && cell < kGoal; }

Observation CliffWalking::encode(std::size_t cell) {
  Observation o = Observation::Zero(kRows * kCols);
  o[static_cast<Eigen::Index>(cell)] = 1.0;
  return o;
}

ObservationBounds CliffWalking::bounds() const {
  return {filled(kRows * kCols, 0.0), filled(kRows * kCols, 1.0)};
}

std::vector<TabularOutcome> CliffWalking::outcomes(std::size_t state, std::size_t action) const {
  if (state >= num_states() || action >= 4) throw DomainError("cliff walking state/action out of range");
  if (state == kGoal) return {{1.0, kGoal, 0.0, true}};
  long row = static_cast<long>(state / kCols);
  long col = static_cast<long>(state % kCols);
  switch (action) {
    case 0: row = std::max(row - 1, 0L); break;
    case 1: col = std::min(col + 1, static_cast<long>(kCols) - 1); break;
    case 2: row = std::min(row + 1, static_cast<long>(kRows) - 1); break;
    default: col = std::max(col - 1, 0L); break;
  }
  const auto next = static_cast<std::size_t>(row) * kCols + static_cast<std::size_t>(col);
  if (is_cliff(next)) return {{1.0, kStart, -100.0 * scale_, false}};
  return {{1.0, next, -1.0 * scale_, next == kGoal}};
}

Observation CliffWalking::on_reset(Rng&) {
  cell_ = kStart;
  return encode(cell_);
}

Environment::Outcome CliffWalking::on_step(const Action& action, Rng&) {
  const auto o = outcomes(cell_, action.index()).front();
  cell_ = o.next_state;
  return {encode(cell_), o.reward, o.terminal};
}

// ---------------------------------------------------------------- CartPole

ObservationBounds CartPole::bounds() const { return symmetric({2 * kXLimit, 20.0, 2 * kThetaLimit, 20.0}); }

Observation CartPole::on_reset(Rng& rng) {
  Observation o(4);
  for (Eigen::Index i = 0; i < 4; ++i) o[i] = uniform(rng, -0.05, 0.05);
  return o;
}

Environment::Outcome CartPole::on_step(const Action& action, Rng&) {
  const Observation& s = state().observation;
  const double x = s[0], x_dot = s[1], theta = s[2], theta_dot = s[3];
  const double force = action.index() == 1 ? kForce : -kForce;
  const double total_mass = kCartMass + kPoleMass;
  const double pole_mass_length = kPoleMass * kHalfLength;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double temp = (force + pole_mass_length * theta_dot * theta_dot * sin_t) / total_mass;
  const double theta_acc = (kGravity * sin_t - cos_t * temp) /
                           (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

  Observation next(4);
  next[0] = x + kDt * x_dot;
  next[1] = x_dot + kDt * x_acc;
  next[2] = theta + kDt * theta_dot;
  next[3] = theta_dot + kDt * theta_acc;
  const bool fell = std::abs(next[0]) > kXLimit || std::abs(next[2]) > kThetaLimit;
  return {std::move(next), 1.0, fell};
}

// ---------------------------------------------------------------- MountainCar

ObservationBounds MountainCar::bounds() const {
  ObservationBounds b;
  b.low = Vector(2);
  b.high = Vector(2);
  b.low << kMinPosition, -kMaxSpeed;
  b.high << kMaxPosition, kMaxSpeed;
  return b;
}

Observation MountainCar::on_reset(Rng& rng) {
  Observation o(2);
  o << uniform(rng, -0.6, -0.4), 0.0;
  return o;
}

Environment::Outcome MountainCar::on_step(const Action& action, Rng&) {
  const Observation& s = state().observation;
  double position = s[0];
  double velocity = s[1];
  velocity += (static_cast<double>(action.index()) - 1.0) * kForce - std::cos(3.0 * position) * kGravity;
  velocity = std::clamp(velocity, -kMaxSpeed, kMaxSpeed);
  position = std::clamp(position + velocity, kMinPosition, kMaxPosition);
  if (position == kMinPosition && velocity < 0.0) velocity = 0.0;
  Observation next(2);
  next << position, velocity;
  return {std::move(next), -1.0, position >= kGoalPosition};
}

// ---------------------------------------------------------------- Pendulum

ActionSpace Pendulum::action_space() const { return ActionSpace::box(filled(1, -kMaxTorque), filled(1, kMaxTorque)); }

ObservationBounds Pendulum::bounds() const { return symmetric({1.0, 1.0, kMaxSpeed}); }

void Pendulum::set_state(double theta, double theta_dot) {
  theta_ = theta;
  theta_dot_ = theta_dot;
  overwrite_observation(observe());
}

Observation Pendulum::observe() const {
  Observation o(3);
  o << std::cos(theta_), std::sin(theta_), theta_dot_;
  return o;
}

Observation Pendulum::on_reset(Rng& rng) {
  theta_ = uniform(rng, -std::numbers::pi, std::numbers::pi);
  theta_dot_ = uniform(rng, -1.0, 1.0);
  return observe();
}

Environment::Outcome Pendulum::on_step(const Action& action, Rng&) {
  const double u = std::clamp(action.values()[0], -kMaxTorque, kMaxTorque);
  const double wrapped = std::remainder(theta_, 2.0 * std::numbers::pi);
  const double cost = wrapped * wrapped + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u;
  double new_dot = theta_dot_ + (3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) +
                                 3.0 / (kMass * kLength * kLength) * u) * kDt;
  new_dot = std::clamp(new_dot, -kMaxSpeed, kMaxSpeed);
  theta_ = theta_ + new_dot * kDt;
  theta_dot_ = new_dot;
  return {observe(), -cost, false};
}

// ---------------------------------------------------------------- PointMass

ActionSpace PointMass::action_space() const { return ActionSpace::box(filled(2, -1.0), filled(2, 1.0)); }

ObservationBounds PointMass::bounds() const { return symmetric({1.0, 1.0, kMaxSpeed, kMaxSpeed, 1.0, 1.0}); }

Observation PointMass::on_reset(Rng& rng) {
  for (Eigen::Index i = 0; i < 2; ++i) pos_[i] = uniform(rng, -0.5, 0.5);
  vel_.setZero();
  for (Eigen::Index i = 0; i < 2; ++i) target_[i] = uniform(rng, -0.8, 0.8);
  Observation o(6);
  o << pos_, vel_, target_;
  return o;
}

Environment::Outcome PointMass::on_step(const Action& action, Rng&) {
  const Vector& u = action.values();
  vel_ = ((1.0 - kDamping) * vel_ + kDt * u).cwiseMax(-kMaxSpeed).cwiseMin(kMaxSpeed);
  pos_ += kDt * vel_;
  for (Eigen::Index i = 0; i < 2; ++i) {
    if (pos_[i] > 1.0 || pos_[i] < -1.0) {
      pos_[i] = std::clamp(pos_[i], -1.0, 1.0);
      vel_[i] = 0.0;
    }
  }
  const double reward = -(pos_ - target_).norm() - kControlCost * u.squaredNorm();
  Observation o(6);
  o << pos_, vel_, target_;
  return {std::move(o), reward, false};
}

// ---------------------------------------------------------------- TwoRegime

TwoRegime::TwoRegime(std::size_t horizon, std::size_t switch_step) : horizon_(horizon), switch_(switch_step) {
  if (switch_ == 0 || switch_ >= horizon_) throw DomainError("regime switch must fall inside the episode");
}

ObservationBounds TwoRegime::bounds() const { return {filled(3, 0.0), filled(3, 1.0)}; }

Observation TwoRegime::observe(std::size_t t) const {
  Observation o(3);
  const bool first = t < switch_;
  o << static_cast<double>(t) / static_cast<double>(horizon_), first ? 1.0 : 0.0, first ? 0.0 : 1.0;
  return o;
}

Observation TwoRegime::on_reset(Rng&) {
  t_ = 0;
  return observe(0);
}

Environment::Outcome TwoRegime::on_step(const Action& action, Rng&) {
  const bool first = t_ < switch_;
  const bool good = (action.index() == 0) == first;
  ++t_;
  return {observe(t_), good ? 1.0 : -1.0, t_ >= horizon_};
}

// ---------------------------------------------------------------- TwoArmedBandit

ObservationBounds TwoArmedBandit::bounds() const { return {filled(1, 1.0), filled(1, 1.0)}; }

Observation TwoArmedBandit::on_reset(Rng&) { return filled(1, 1.0); }

Environment::Outcome TwoArmedBandit::on_step(const Action& action, Rng&) {
  return {filled(1, 1.0), action.index() == 0 ? 1.0 : 0.0, true};
}

// ---------------------------------------------------------------- ConstantReward

ObservationBounds ConstantReward::bounds() const { return {filled(1, 1.0), filled(1, 1.0)}; }

Observation ConstantReward::on_reset(Rng&) { return filled(1, 1.0); }

Environment::Outcome ConstantReward::on_step(const Action&, Rng&) { return {filled(1, 1.0), reward_, false}; }

// ---------------------------------------------------------------- factory

EnvironmentPtr make_environment(const std::string& name) {
  if (name == "cliff_walking") return std::make_unique<CliffWalking>();
  if (name == "cartpole") return std::make_unique<CartPole>();
  if (name == "mountain_car") return std::make_unique<MountainCar>();
  if (name == "pendulum") return std::make_unique<Pendulum>();
  if (name == "point_mass") return std::make_unique<PointMass>();
  if (name == "two_regime") return std::make_unique<TwoRegime>();
  if (name == "bandit") return std::make_unique<TwoArmedBandit>();
  if (name == "constant") return std::make_unique<ConstantReward>();
  throw UsageError("unknown environment '" + name + "'");
}

std::vector<std::string> environment_names() {
  return {"cliff_walking", "cartpole", "mountain_car", "pendulum", "point_mass", "two_regime", "bandit", "constant"};
}

}  // namespace amtd
