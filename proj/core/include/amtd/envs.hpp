#pragma once

#include <string>
#include <vector>

#include "amtd/env.hpp"
#include "amtd/tabular.hpp"

namespace amtd {

/// 4x12 grid; start (3,0), goal (3,11), cliff cells (3,1..10).
/// Actions: 0 up, 1 right, 2 down, 3 left. Observation is a one-hot of the cell index.
class CliffWalking final : public Environment, public TabularModel {
 public:
  static constexpr std::size_t kRows = 4;
  static constexpr std::size_t kCols = 12;
  static constexpr std::size_t kStart = 36;
  static constexpr std::size_t kGoal = 47;

  explicit CliffWalking(double reward_scale = 1.0, std::size_t horizon = 200);

  std::string name() const override { return "cliff_walking"; }
  std::size_t observation_size() const override { return kRows * kCols; }
  ActionSpace action_space() const override { return ActionSpace::discrete(4); }
  ObservationBounds bounds() const override;
  std::size_t horizon() const override { return horizon_; }

  std::size_t num_states() const override { return kRows * kCols; }
  std::size_t num_actions() const override { return 4; }
  std::size_t start_state() const override { return kStart; }
  std::vector<TabularOutcome> outcomes(std::size_t state, std::size_t action) const override;

  static bool is_cliff(std::size_t cell);
  static Observation encode(std::size_t cell);
  std::size_t cell() const { return cell_; }

 protected:
  Observation on_reset(Rng& rng) override;
  Outcome on_step(const Action& action, Rng& rng) override;

 private:
  double scale_;
  std::size_t horizon_;
  std::size_t cell_ = kStart;
};

/// Cart-pole balancing with Euler integration and the classic-control constants.
class CartPole final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kForce = 10.0;
  static constexpr double kDt = 0.02;
  static constexpr double kXLimit = 2.4;
  static constexpr double kThetaLimit = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;

  explicit CartPole(std::size_t horizon = 200) : horizon_(horizon) {}

  std::string name() const override { return "cartpole"; }
  std::size_t observation_size() const override { return 4; }
  ActionSpace action_space() const override { return ActionSpace::discrete(2); }
  ObservationBounds bounds() const override;
  std::size_t horizon() const override { return horizon_; }

  void set_state(const Observation& s) { overwrite_observation(s); }

 protected:
  Observation on_reset(Rng& rng) override;
  Outcome on_step(const Action& action, Rng& rng) override;

 private:
  std::size_t horizon_;
};

/// Under-powered car in a valley; goal at position 0.5. Actions: 0 push left, 1 none, 2 push right.
class MountainCar final : public Environment {
 public:
  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPosition = 0.5;
  static constexpr double kForce = 0.001;
  static constexpr double kGravity = 0.0025;

  explicit MountainCar(std::size_t horizon = 200) : horizon_(horizon) {}

  std::string name() const override { return "mountain_car"; }
  std::size_t observation_size() const override { return 2; }
  ActionSpace action_space() const override { return ActionSpace::discrete(3); }
  ObservationBounds bounds() const override;
  std::size_t horizon() const override { return horizon_; }

 protected:
  Observation on_reset(Rng& rng) override;
  Outcome on_step(const Action& action, Rng& rng) override;

 private:
  std::size_t horizon_;
};

/// Torque-limited pendulum swing-up. Observation (cos th, sin th, thdot), action torque in [-2, 2].
class Pendulum final : public Environment {
 public:
  static constexpr double kMaxSpeed = 8.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr double kDt = 0.05;
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;

  explicit Pendulum(std::size_t horizon = 200) : horizon_(horizon) {}

  std::string name() const override { return "pendulum"; }
  std::size_t observation_size() const override { return 3; }
  ActionSpace action_space() const override;
  ObservationBounds bounds() const override;
  std::size_t horizon() const override { return horizon_; }

  double angle() const { return theta_; }
  double angular_velocity() const { return theta_dot_; }
  void set_state(double theta, double theta_dot);

 protected:
  Observation on_reset(Rng& rng) override;
  Outcome on_step(const Action& action, Rng& rng) override;

 private:
  Observation observe() const;
  std::size_t horizon_;
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
};

/// Damped 2-D point mass steered by a bounded force toward a random target.
/// Observation (px, py, vx, vy, tx, ty); reward is minus the distance to the target.
class PointMass final : public Environment {
 public:
  static constexpr double kDt = 0.1;
  static constexpr double kDamping = 0.1;
  static constexpr double kMaxSpeed = 2.0;
  static constexpr double kControlCost = 0.01;

  explicit PointMass(std::size_t horizon = 100) : horizon_(horizon) {}

  std::string name() const override { return "point_mass"; }
  std::size_t observation_size() const override { return 6; }
  ActionSpace action_space() const override;
  ObservationBounds bounds() const override;
  std::size_t horizon() const override { return horizon_; }

 protected:
  Observation on_reset(Rng& rng) override;
  Outcome on_step(const Action& action, Rng& rng) override;

 private:
  Vector pos_ = Vector::Zero(2);
  Vector vel_ = Vector::Zero(2);
  Vector target_ = Vector::Zero(2);
  std::size_t horizon_;
};

/// Fixed-length episode whose reward sign flips at `switch_step`.
/// In the first regime action 0 earns +1 and action 1 earns -1; in the second the signs swap.
/// Observation (t / horizon, in_first_regime, in_second_regime). The last step is terminal.
class TwoRegime final : public Environment {
 public:
  explicit TwoRegime(std::size_t horizon = 20, std::size_t switch_step = 10);

  std::string name() const override { return "two_regime"; }
  std::size_t observation_size() const override { return 3; }
  ActionSpace action_space() const override { return ActionSpace::discrete(2); }
  ObservationBounds bounds() const override;
  std::size_t horizon() const override { return horizon_; }
  std::size_t switch_step() const { return switch_; }

 protected:
  Observation on_reset(Rng& rng) override;
  Outcome on_step(const Action& action, Rng& rng) override;

 private:
  Observation observe(std::size_t t) const;
  std::size_t horizon_;
  std::size_t switch_;
  std::size_t t_ = 0;
};

/// One-step two-armed bandit: arm 0 pays 1, arm 1 pays 0.
class TwoArmedBandit final : public Environment {
 public:
  std::string name() const override { return "bandit"; }
  std::size_t observation_size() const override { return 1; }
  ActionSpace action_space() const override { return ActionSpace::discrete(2); }
  ObservationBounds bounds() const override;
  std::size_t horizon() const override { return 1; }

 protected:
  Observation on_reset(Rng& rng) override;
  Outcome on_step(const Action& action, Rng& rng) override;
};

/// Never-terminating chain with one observation; both actions pay `reward`.
class ConstantReward final : public Environment {
 public:
  explicit ConstantReward(double reward = 1.0, std::size_t horizon = 100)
      : reward_(reward), horizon_(horizon) {}

  std::string name() const override { return "constant"; }
  std::size_t observation_size() const override { return 1; }
  ActionSpace action_space() const override { return ActionSpace::discrete(2); }
  ObservationBounds bounds() const override;
  std::size_t horizon() const override { return horizon_; }
  double reward() const { return reward_; }

 protected:
  Observation on_reset(Rng& rng) override;
  Outcome on_step(const Action& action, Rng& rng) override;

 private:
  double reward_;
  std::size_t horizon_;
};

EnvironmentPtr make_environment(const std::string& name);
std::vector<std::string> environment_names();

}  // namespace amtd
