#include "amtd/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "amtd/envs.hpp"
#include "amtd/errors.hpp"
#include "amtd/returns.hpp"
#include "amtd/selection.hpp"
#include "amtd/tabular.hpp"
#include "amtd/variance.hpp"

namespace amtd {

namespace {

double weighted_loss(const Network& net, const Matrix& x, const Matrix& w) { return (net.forward(x).array() * w.array()).sum(); }

std::string fmt(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = normal(rng, 0.0, scale);
  }
  return m;
}

std::vector<CheckResult> gradient_suite(std::uint64_t seed) {
  struct Arch {
    const char* name;
    std::vector<std::size_t> sizes;
    Activation out;
  };
  const std::vector<Arch> archs = {
      {"discrete actor", {48, 20, 4}, Activation::softmax},
      {"discrete critic", {48, 20, 4}, Activation::identity},
      {"classifier", {52, 20, 2}, Activation::softmax},
      {"continuous actor", {3, 64, 64, 1}, Activation::tanh},
      {"continuous critic", {4, 64, 64, 1}, Activation::identity},
  };
  std::vector<CheckResult> out;
  Rng rng(seed);
  for (const auto& a : archs) {
    double worst = 0.0;
    std::size_t checked = 0;
    std::size_t skipped = 0;
    for (int draw = 0; draw < 10; ++draw) {
      Network net = Network::mlp(a.sizes, Activation::relu, a.out);
      net.init_uniform(rng);
      const Matrix x = random_matrix(static_cast<Eigen::Index>(a.sizes.front()), 3, rng, 1.0);
      const Matrix w = random_matrix(static_cast<Eigen::Index>(a.sizes.back()), 3, rng, 1.0);
      const auto r = check_gradients(net, x, w);
      worst = std::max(worst, r.max_relative_error);
      checked += r.checked;
      skipped += r.skipped;
    }
    out.push_back({"gradients", a.name, worst < 1e-4,
                   "max relative error " + fmt(worst) + " over " + std::to_string(checked) + " coordinates, " +
                       std::to_string(skipped) + " kink skips"});
  }
  return out;
}

std::vector<CheckResult> returns_suite(std::uint64_t seed) {
  Rng rng(seed);
  double worst_sarsa = 0.0;
  bool reductions = true;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + uniform_index(rng, 8);
    const double gamma = uniform(rng, 0.5, 1.0);
    std::vector<double> rewards(n);
    for (auto& r : rewards) r = uniform(rng, -2.0, 2.0);
    const double q = uniform(rng, -5.0, 5.0);
    double expect = 0.0;
    for (std::size_t k = n; k-- > 0;) expect = rewards[k] + gamma * expect;
    expect += std::pow(gamma, static_cast<double>(n)) * q;
    worst_sarsa = std::max(worst_sarsa, std::abs(n_step_expected_sarsa(rewards, q, gamma).value - expect));

    const std::size_t l = 1 + uniform_index(rng, 4);
    std::vector<NStepTarget> targets(l);
    for (std::size_t i = 0; i < l; ++i) targets[i] = {i + 1, uniform(rng, -10.0, 10.0)};
    const auto weights = ReturnWeights::geometric(l, 0.5);
    reductions = reductions && gated_return(targets, weights, GateVector::all_on(l)) == averaged_return(targets, weights);
    GateVector first{std::vector<std::uint8_t>(l, 0)};
    first.bits[0] = 1;
    reductions = reductions && gated_return(targets, weights, first) == targets[0].value;
  }
  return {{"returns", "n-step expected sarsa", worst_sarsa < 1e-12, "max abs error " + fmt(worst_sarsa)},
          {"returns", "gate reductions", reductions, reductions ? "exact" : "mismatch"}};
}

std::vector<CheckResult> variance_suite(std::uint64_t seed) {
  RewardChain chain = RewardChain::random(5, 0.9, 0.5, seed);
  chain.values = chain.exact_values();
  for (Eigen::Index i = 0; i < chain.values.size(); ++i) chain.values[i] += 0.5 * std::sin(1.0 + static_cast<double>(i));
  std::vector<CheckResult> out;
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto r = variance_recursion_check(chain, n, 100'000, derive_seed(seed, n));
    const bool ok = std::abs(r.exact_residual) <= 3.0 * r.exact_residual_stderr;
    out.push_back({"variance", "recursion n=" + std::to_string(n), ok,
                   "residual " + fmt(r.exact_residual) + " stderr " + fmt(r.exact_residual_stderr)});
  }
  return out;
}

std::vector<CheckResult> selection_suite(std::uint64_t seed) {
  Rng rng(seed);
  bool shift_ok = true;
  for (int trial = 0; trial < 10'000; ++trial) {
    const std::size_t k = 1 + uniform_index(rng, 10);
    std::vector<SelectionScore> scores(k);
    for (std::size_t i = 0; i < k; ++i) scores[i] = {i, std::round(uniform(rng, -8.0, 8.0)) / 4.0};
    const std::size_t before = select_in_chunk(scores);
    const double shift = std::ldexp(std::round(uniform(rng, -64.0, 64.0)), -2);
    for (auto& s : scores) s.value += shift;
    shift_ok = shift_ok && select_in_chunk(scores) == before;
  }
  bool count_ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t t_len = 1 + uniform_index(rng, 200);
    const std::size_t k = 1 + uniform_index(rng, 12);
    ChunkSelector sel(k, 0.99);
    for (std::size_t t = 0; t < t_len; ++t) {
      Transition tr;
      tr.state = Vector::Zero(1);
      tr.next_state = Vector::Zero(1);
      tr.step_index = t;
      tr.reward = 1.0;
      tr.done = t + 1 == t_len;
      sel.observe(tr, uniform(rng, 0.0, 1.0));
    }
    count_ok = count_ok && sel.finish().size() == (t_len + k - 1) / k;
  }
  return {{"selection", "argmax shift invariance", shift_ok, "10000 cases"},
          {"selection", "chunk counts", count_ok, "100 episodes"}};
}

std::vector<CheckResult> environment_suite() {
  CliffWalking cliff;
  const double best = optimal_return_oracle(static_cast<const TabularModel&>(cliff), 1.0);
  return {{"environments", "cliff walking optimum", std::abs(best + 13.0) < 1e-9, "optimal return " + fmt(best)}};
}

}  // namespace

GradientCheckResult check_gradients(const Network& net, const Matrix& x, const Matrix& weights, double h) {
  GradientCheckResult r;
  GradTape tape;
  net.forward(x, tape);
  const std::vector<double> g = net.backward(tape, weights);
  Network probe = net;
  const double base = weighted_loss(probe, x, weights);
  for (std::size_t i = 0; i < probe.num_params(); ++i) {
    const double original = probe.params()[i];
    probe.params()[i] = original + h;
    const double plus = weighted_loss(probe, x, weights);
    probe.params()[i] = original - h;
    const double minus = weighted_loss(probe, x, weights);
    probe.params()[i] = original;
    const double forward_slope = (plus - base) / h;
    const double backward_slope = (base - minus) / h;
    if (std::abs(forward_slope - backward_slope) > 1e-3 * std::max(1.0, std::abs(forward_slope) + std::abs(backward_slope))) {
      ++r.skipped;
      continue;
    }
    const double fd = (plus - minus) / (2.0 * h);
    const double rel = std::abs(fd - g[i]) / std::max({std::abs(fd) + std::abs(g[i]), 1e-6});
    r.max_relative_error = std::max(r.max_relative_error, rel);
    ++r.checked;
  }
  return r;
}

std::vector<std::string> check_suites() { return {"gradients", "returns", "variance", "selection", "environments"}; }

std::vector<CheckResult> run_checks(const std::string& suite, std::uint64_t seed) {
  std::vector<CheckResult> out;
  auto add = [&](std::vector<CheckResult> part) { out.insert(out.end(), part.begin(), part.end()); };
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "gradients") known = true, add(gradient_suite(seed));
  if (all || suite == "returns") known = true, add(returns_suite(seed));
  if (all || suite == "variance") known = true, add(variance_suite(seed));
  if (all || suite == "selection") known = true, add(selection_suite(seed));
  if (all || suite == "environments") known = true, add(environment_suite());
  if (!known) throw UsageError("unknown check suite: " + suite);
  return out;
}

}  // namespace amtd
