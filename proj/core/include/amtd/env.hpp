#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "amtd/random.hpp"
#include "amtd/tensor.hpp"

namespace amtd {

using Observation = Vector;

/// Either a discrete index or a continuous vector, never both.
class Action {
 public:
  Action() : value_(std::size_t{0}) {}
  static Action discrete(std::size_t index) { return Action(index); }
  static Action continuous(Vector values) { return Action(std::move(values)); }

  bool is_discrete() const { return std::holds_alternative<std::size_t>(value_); }
  std::size_t index() const { return std::get<std::size_t>(value_); }
  const Vector& values() const { return std::get<Vector>(value_); }

  // One-hot for discrete actions of an n-way space, the raw vector otherwise.
  Vector features(std::size_t num_discrete) const;

  bool operator==(const Action& other) const;

 private:
  explicit Action(std::size_t index) : value_(index) {}
  explicit Action(Vector values) : value_(std::move(values)) {}
  std::variant<std::size_t, Vector> value_;
};

class ActionSpace {
 public:
  static ActionSpace discrete(std::size_t n);
  static ActionSpace box(Vector low, Vector high);

  bool is_discrete() const { return discrete_; }
  std::size_t num_actions() const { return n_; }
  const Vector& low() const { return low_; }
  const Vector& high() const { return high_; }
  // Number of classifier/critic input features contributed by an action.
  std::size_t feature_size() const { return discrete_ ? n_ : static_cast<std::size_t>(low_.size()); }
  bool contains(const Action& a) const;
  Action sample(Rng& rng) const;

 private:
  bool discrete_ = true;
  std::size_t n_ = 0;
  Vector low_;
  Vector high_;
};

struct EnvState {
  Observation observation;
  std::size_t step_index = 0;
  bool done = false;
};

struct Transition {
  Observation state;
  Action action;
  double reward = 0.0;
  std::size_t step_index = 0;
  Observation next_state;
  bool done = false;      // episode over (terminal state or time limit)
  bool terminal = false;  // true terminal state: no bootstrapping beyond next_state
};

struct ObservationBounds {
  Vector low;
  Vector high;
  bool contains(const Observation& o) const;
};

/// Episodic environment with a fixed time limit. Subclasses implement the dynamics;
/// the base class enforces the done/horizon/action-domain contracts.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual std::size_t observation_size() const = 0;
  virtual ActionSpace action_space() const = 0;
  virtual ObservationBounds bounds() const = 0;
  virtual std::size_t horizon() const = 0;

  EnvState reset(std::uint64_t seed);
  Transition step(const Action& action);
  const EnvState& state() const { return state_; }

 protected:
  struct Outcome {
    Observation next;
    double reward = 0.0;
    bool terminal = false;
  };
  virtual Observation on_reset(Rng& rng) = 0;
  virtual Outcome on_step(const Action& action, Rng& rng) = 0;

  // For subclasses that let tests place the system in a chosen state.
  void overwrite_observation(Observation o) { state_.observation = std::move(o); }

 private:
  Rng rng_;
  EnvState state_;
  bool started_ = false;
};

using EnvironmentPtr = std::unique_ptr<Environment>;

}  // namespace amtd
