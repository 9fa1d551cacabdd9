#include "amtd/env.hpp"

#include <cmath>

#include "amtd/errors.hpp"

namespace amtd {

Vector Action::features(std::size_t num_discrete) const {
  if (!is_discrete()) return values();
  Vector v = Vector::Zero(static_cast<Eigen::Index>(num_discrete));
  if (index() >= num_discrete) throw DomainError("discrete action index out of range");
  v[static_cast<Eigen::Index>(index())] = 1.0;
  return v;
}

bool Action::operator==(const Action& other) const {
  if (is_discrete() != other.is_discrete()) return false;
  if (is_discrete()) return index() == other.index();
  return values().size() == other.values().size() && values() == other.values();
}

ActionSpace ActionSpace::discrete(std::size_t n) {
  if (n < 2) throw DomainError("discrete action spaces need at least two actions");
  ActionSpace s;
  s.discrete_ = true;
  s.n_ = n;
  return s;
}

ActionSpace ActionSpace::box(Vector low, Vector high) {
  if (low.size() == 0 || low.size() != high.size()) throw DimensionError("box bounds must be non-empty and equal length");
  if (!(low.array() < high.array()).all()) throw DomainError("box bounds require low < high elementwise");
  ActionSpace s;
  s.discrete_ = false;
  s.n_ = 0;
  s.low_ = std::move(low);
  s.high_ = std::move(high);
  return s;
}

bool ActionSpace::contains(const Action& a) const {
  if (discrete_) return a.is_discrete() && a.index() < n_;
  if (a.is_discrete()) return false;
  const Vector& v = a.values();
  if (v.size() != low_.size()) return false;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < low_[i] || v[i] > high_[i]) return false;
  }
  return true;
}

Action ActionSpace::sample(Rng& rng) const {
  if (discrete_) return Action::discrete(uniform_index(rng, n_));
  Vector v(low_.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform(rng, low_[i], high_[i]);
  return Action::continuous(std::move(v));
}

bool ObservationBounds::contains(const Observation& o) const {
  if (o.size() != low.size()) return false;
  for (Eigen::Index i = 0; i < o.size(); ++i) {
    if (!std::isfinite(o[i]) || o[i] < low[i] || o[i] > high[i]) return false;
  }
  return true;
}

EnvState Environment::reset(std::uint64_t seed) {
  rng_.seed(seed);
  state_.observation = on_reset(rng_);
  state_.step_index = 0;
  state_.done = false;
  started_ = true;
  return state_;
}

Transition Environment::step(const Action& action) {
  if (!started_) throw UsageError(name() + ": step before reset");
  if (state_.done) throw UsageError(name() + ": step on a finished episode");
  if (!action_space().contains(action)) throw DomainError(name() + ": action outside the action space");

  Transition tr;
  tr.state = state_.observation;
  tr.action = action;
  tr.step_index = state_.step_index;
  Outcome out = on_step(action, rng_);
  if (!std::isfinite(out.reward)) throw NumericError(name() + ": non-finite reward");
  tr.reward = out.reward;
  tr.next_state = out.next;
  tr.terminal = out.terminal;
  state_.observation = std::move(out.next);
  ++state_.step_index;
  state_.done = out.terminal || state_.step_index >= horizon();
  tr.done = state_.done;
  return tr;
}

}  // namespace amtd
