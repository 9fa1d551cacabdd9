#include "amtd/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amtd/env.hpp"
#include "amtd/errors.hpp"

namespace amtd {

namespace {

double backup(const TabularModel& model, const std::vector<double>& v, std::size_t s, std::size_t a,
              double gamma) {
  double q = 0.0;
  for (const auto& o : model.outcomes(s, a)) {
    q += o.probability * (o.reward + (o.terminal ? 0.0 : gamma * v[o.next_state]));
  }
  return q;
}

}  // namespace

ValueIterationResult value_iteration(const TabularModel& model, double gamma, double tolerance,
                                     std::size_t max_iterations) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("discount must lie in [0, 1]");
  const std::size_t ns = model.num_states();
  const std::size_t na = model.num_actions();
  if (ns == 0 || na == 0) throw UsageError("tabular model has no states or actions");

  ValueIterationResult res;
  res.values.assign(ns, 0.0);
  std::vector<double> next(ns);
  for (res.iterations = 1; res.iterations <= max_iterations; ++res.iterations) {
    double delta = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < na; ++a) best = std::max(best, backup(model, res.values, s, a, gamma));
      next[s] = best;
      delta = std::max(delta, std::abs(best - res.values[s]));
    }
    res.values.swap(next);
    if (delta < tolerance) break;
  }
  if (res.iterations > max_iterations) throw NumericError("value iteration did not converge");

  res.greedy_policy.assign(ns, 0);
  for (std::size_t s = 0; s < ns; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < na; ++a) {
      const double q = backup(model, res.values, s, a, gamma);
      if (q > best + 1e-12) {
        best = q;
        res.greedy_policy[s] = a;
      }
    }
  }
  return res;
}

double optimal_return_oracle(const TabularModel& model, double gamma) {
  const auto vi = value_iteration(model, gamma);
  const std::size_t ns = model.num_states();
  // Undiscounted policy evaluation of the greedy policy.
  std::vector<double> g(ns, 0.0);
  std::vector<double> next(ns);
  constexpr std::size_t kMaxSweeps = 1'000'000;
  for (std::size_t sweep = 0;; ++sweep) {
    if (sweep == kMaxSweeps) throw NumericError("greedy policy never terminates");
    double delta = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      next[s] = backup(model, g, s, vi.greedy_policy[s], 1.0);
      delta = std::max(delta, std::abs(next[s] - g[s]));
    }
    g.swap(next);
    if (delta < 1e-10) break;
  }
  return g[model.start_state()];
}

double optimal_return_oracle(const Environment& env, double gamma) {
  const auto* model = dynamic_cast<const TabularModel*>(&env);
  if (model == nullptr) throw UnsupportedError(env.name() + " has no tabular model");
  return optimal_return_oracle(*model, gamma);
}

}  // namespace amtd
