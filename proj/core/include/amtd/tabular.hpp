#pragma once

#include <cstddef>
#include <vector>

namespace amtd {

struct TabularOutcome {
  double probability = 1.0;
  std::size_t next_state = 0;
  double reward = 0.0;
  bool terminal = false;
};

/// Finite MDP view of an environment, used by exact oracles.
class TabularModel {
 public:
  virtual ~TabularModel() = default;
  virtual std::size_t num_states() const = 0;
  virtual std::size_t num_actions() const = 0;
  virtual std::size_t start_state() const = 0;
  virtual std::vector<TabularOutcome> outcomes(std::size_t state, std::size_t action) const = 0;
};

struct ValueIterationResult {
  std::vector<double> values;
  std::vector<std::size_t> greedy_policy;
  std::size_t iterations = 0;
};

// Bellman optimality iteration until the sup-norm change drops below `tolerance`.
ValueIterationResult value_iteration(const TabularModel& model, double gamma, double tolerance = 1e-10,
                                     std::size_t max_iterations = 1'000'000);

// Undiscounted expected episode return of the gamma-greedy optimal policy from the start state.
double optimal_return_oracle(const TabularModel& model, double gamma);

class Environment;
// Throws UnsupportedError unless the environment exposes a tabular model.
double optimal_return_oracle(const Environment& env, double gamma);

}  // namespace amtd
