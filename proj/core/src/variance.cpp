#include "amtd/variance.hpp"

#include <cmath>
#include <iomanip>

#include "amtd/errors.hpp"
#include "amtd/random.hpp"

namespace amtd {

Vector RewardChain::exact_values() const {
  const auto ns = static_cast<Eigen::Index>(num_states());
  Matrix a = Matrix::Identity(ns, ns) - gamma * transition;
  return a.partialPivLu().solve(reward_mean);
}

RewardChain RewardChain::random(std::size_t num_states, double gamma, double noise_std, std::uint64_t seed) {
  Rng rng(seed);
  const auto ns = static_cast<Eigen::Index>(num_states);
  RewardChain c;
  c.transition = Matrix(ns, ns);
  for (Eigen::Index i = 0; i < ns; ++i) {
    for (Eigen::Index j = 0; j < ns; ++j) c.transition(i, j) = uniform(rng, 0.05, 1.0);
    c.transition.row(i) /= c.transition.row(i).sum();
  }
  c.reward_mean = Vector(ns);
  for (Eigen::Index i = 0; i < ns; ++i) c.reward_mean[i] = uniform(rng, -1.0, 1.0);
  c.reward_noise_std = Vector::Constant(ns, noise_std);
  c.gamma = gamma;
  return c;
}

RewardChain RewardChain::deterministic_cycle(std::size_t num_states, double gamma) {
  const auto ns = static_cast<Eigen::Index>(num_states);
  RewardChain c;
  c.transition = Matrix::Zero(ns, ns);
  for (Eigen::Index i = 0; i < ns; ++i) c.transition(i, (i + 1) % ns) = 1.0;
  c.reward_mean = Vector::LinSpaced(ns, 0.0, 1.0);
  c.reward_noise_std = Vector::Zero(ns);
  c.gamma = gamma;
  return c;
}

namespace {

struct Rollout {
  std::vector<double> returns;  // R^k for k = 1..n
  double delta_n = 0.0;
};

std::size_t next_state(const RewardChain& c, std::size_t s, Rng& rng) {
  const double u = uniform(rng, 0.0, 1.0);
  double acc = 0.0;
  const auto row = static_cast<Eigen::Index>(s);
  const auto ns = static_cast<Eigen::Index>(c.num_states());
  for (Eigen::Index j = 0; j < ns; ++j) {
    acc += c.transition(row, j);
    if (u < acc) return static_cast<std::size_t>(j);
  }
  return c.num_states() - 1;
}

Rollout roll(const RewardChain& c, const Vector& v, std::size_t n, Rng& rng) {
  Rollout out;
  out.returns.resize(n);
  std::size_t s = c.start_state;
  double reward_sum = 0.0;
  double discount = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto si = static_cast<Eigen::Index>(s);
    double r = c.reward_mean[si];
    if (c.reward_noise_std[si] > 0.0) r += normal(rng, 0.0, c.reward_noise_std[si]);
    const std::size_t s_next = next_state(c, s, rng);
    reward_sum += discount * r;
    discount *= c.gamma;
    out.returns[k] = reward_sum + discount * v[static_cast<Eigen::Index>(s_next)];
    if (k + 1 == n) out.delta_n = r + c.gamma * v[static_cast<Eigen::Index>(s_next)] - v[si];
    s = s_next;
  }
  return out;
}

struct Moments {
  double mean_x = 0, mean_y = 0;
  double var_x = 0, var_y = 0, cov = 0;
  double var_of_var_x = 0, var_of_cov = 0;  // sampling variance of the estimators
};

Moments moments(const std::vector<double>& x, const std::vector<double>& y) {
  Moments m;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    m.mean_x += x[i];
    m.mean_y += y[i];
  }
  m.mean_x /= n;
  m.mean_y /= n;
  double m4x = 0, mxy22 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - m.mean_x;
    const double dy = y[i] - m.mean_y;
    m.var_x += dx * dx;
    m.var_y += dy * dy;
    m.cov += dx * dy;
    m4x += dx * dx * dx * dx;
    mxy22 += dx * dx * dy * dy;
  }
  const double pop_var_x = m.var_x / n;
  const double pop_cov = m.cov / n;
  m.var_x /= n - 1;
  m.var_y /= n - 1;
  m.cov /= n - 1;
  m.var_of_var_x = std::max(0.0, (m4x / n - pop_var_x * pop_var_x) / n);
  m.var_of_cov = std::max(0.0, (mxy22 / n - pop_cov * pop_cov) / n);
  return m;
}

}  // namespace

VarianceReport variance_recursion_check(const RewardChain& chain, std::size_t n, std::size_t num_rollouts,
                                        std::uint64_t seed) {
  if (n < 2) throw UsageError("variance recursion needs n >= 2");
  if (num_rollouts < 8) throw UsageError("too few rollouts for four independent groups");
  const Vector v = chain.values.size() > 0 ? chain.values : chain.exact_values();
  Rng rng(seed);

  const std::size_t group = num_rollouts / 4;
  std::vector<double> rn[4], rn1[4], dn[4];
  for (int g = 0; g < 4; ++g) {
    rn[g].reserve(group);
    rn1[g].reserve(group);
    dn[g].reserve(group);
    for (std::size_t i = 0; i < group; ++i) {
      Rollout ro = roll(chain, v, n, rng);
      rn[g].push_back(ro.returns[n - 1]);
      rn1[g].push_back(ro.returns[n - 2]);
      dn[g].push_back(ro.delta_n);
    }
  }
  const Moments a = moments(rn[0], rn[0]);
  const Moments b = moments(rn1[1], rn1[1]);
  const Moments c = moments(dn[2], dn[2]);
  const Moments d = moments(rn1[3], dn[3]);

  VarianceReport rep;
  rep.n = n;
  rep.rollouts = 4 * group;
  rep.var_n = a.var_x;
  rep.var_n_minus_1 = b.var_x;
  rep.var_delta = c.var_x;
  rep.cov = d.cov;
  const double g1 = std::pow(chain.gamma, static_cast<double>(n - 1));
  rep.approx_residual = rep.var_n - rep.var_n_minus_1 - g1 * g1 * rep.var_delta;
  rep.exact_residual = rep.approx_residual - 2.0 * g1 * rep.cov;
  rep.exact_residual_stderr = std::sqrt(a.var_of_var_x + b.var_of_var_x + g1 * g1 * g1 * g1 * c.var_of_var_x +
                                        4.0 * g1 * g1 * d.var_of_cov);
  rep.low_rollout_warning = num_rollouts < 10'000;
  return rep;
}

std::vector<double> return_variances(const RewardChain& chain, std::size_t max_n, std::size_t num_rollouts,
                                     std::uint64_t seed) {
  if (max_n == 0 || num_rollouts < 2) throw UsageError("need max_n >= 1 and at least two rollouts");
  const Vector v = chain.values.size() > 0 ? chain.values : chain.exact_values();
  Rng rng(seed);
  std::vector<std::vector<double>> samples(max_n);
  for (std::size_t i = 0; i < num_rollouts; ++i) {
    Rollout ro = roll(chain, v, max_n, rng);
    for (std::size_t k = 0; k < max_n; ++k) samples[k].push_back(ro.returns[k]);
  }
  std::vector<double> out;
  for (const auto& s : samples) out.push_back(moments(s, s).var_x);
  return out;
}

void write_variance_csv(std::ostream& out, const std::vector<VarianceReport>& reports) {
  out << "n,var_n,var_n_minus_1,var_delta,cov,exact_residual,approx_residual\n";
  out << std::setprecision(17);
  for (const auto& r : reports) {
    out << r.n << ',' << r.var_n << ',' << r.var_n_minus_1 << ',' << r.var_delta << ',' << r.cov << ','
        << r.exact_residual << ',' << r.approx_residual << '\n';
  }
}

}  // namespace amtd
