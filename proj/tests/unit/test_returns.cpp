#include <gtest/gtest.h>

#include <cmath>

#include "amtd/errors.hpp"
#include "amtd/random.hpp"
#include "amtd/returns.hpp"

using namespace amtd;

namespace {

// Sum over k of r_k times gamma multiplied k times, then the tail value.
double enumerate(const std::vector<double>& rewards, double tail, double gamma) {
  double total = 0.0;
  for (std::size_t k = 0; k < rewards.size(); ++k) {
    double w = 1.0;
    for (std::size_t j = 0; j < k; ++j) w *= gamma;
    total += w * rewards[k];
  }
  double w = 1.0;
  for (std::size_t j = 0; j < rewards.size(); ++j) w *= gamma;
  return total + w * tail;
}

}  // namespace

TEST(TdError, Formula) {
  EXPECT_NEAR(td_error(1.0, 0.5, 0.4, 1.0), 1.1, 1e-15);
  EXPECT_EQ(td_error(1.0, 2.0, 1.0 + 0.9 * 2.0, 0.9), 0.0);
  EXPECT_EQ(td_error(3.0, 123.0, 1.0, 0.0), 2.0);
}

TEST(NStep, DirectFormula) {
  const std::vector<double> r{1.0, 1.0};
  EXPECT_DOUBLE_EQ(n_step_expected_sarsa(r, 2.0, 0.5).value, 2.0);
  EXPECT_EQ(n_step_expected_sarsa(r, 2.0, 0.5).step_length, 2u);
}

TEST(NStep, WholeEpisodeIsMonteCarlo) {
  const std::vector<double> r{-1.0, 0.5, 2.0, -3.0};
  const double gamma = 0.9;
  const double mc = -1.0 + 0.9 * 0.5 + 0.81 * 2.0 + 0.729 * -3.0;
  EXPECT_NEAR(n_step_expected_sarsa(r, 0.0, gamma).value, mc, 1e-14);
}

TEST(NStep, EmptyRewardsThrow) {
  EXPECT_THROW(n_step_expected_sarsa(std::span<const double>(), 0.0, 0.9), UsageError);
}

TEST(NStep, MatchesEnumerationOnRandomMdp) {
  // Random 4-state, 2-action MDP driven by a fixed stochastic policy.
  Rng rng(17);
  const int ns = 4, na = 2;
  double reward[4][2], q[4][2], pi[4][2];
  int next[4][2];
  for (int s = 0; s < ns; ++s) {
    const double p0 = uniform(rng, 0.1, 0.9);
    pi[s][0] = p0;
    pi[s][1] = 1.0 - p0;
    for (int a = 0; a < na; ++a) {
      reward[s][a] = uniform(rng, -1, 1);
      q[s][a] = uniform(rng, -5, 5);
      next[s][a] = static_cast<int>(uniform_index(rng, ns));
    }
  }
  const double gamma = 0.95;
  for (int trial = 0; trial < 50; ++trial) {
    int s = static_cast<int>(uniform_index(rng, ns));
    std::vector<double> rewards;
    const std::size_t n = 1 + uniform_index(rng, 8);
    for (std::size_t k = 0; k < n; ++k) {
      const int a = uniform(rng, 0, 1) < pi[s][0] ? 0 : 1;
      rewards.push_back(reward[s][a]);
      s = next[s][a];
    }
    const double tail = pi[s][0] * q[s][0] + pi[s][1] * q[s][1];
    EXPECT_NEAR(n_step_expected_sarsa(rewards, tail, gamma).value, enumerate(rewards, tail, gamma), 1e-12);
  }
}

TEST(Segmented, UnitSegmentsEqualNStep) {
  const std::vector<double> r{0.3, -0.2, 1.5};
  std::vector<RewardSegment> segs;
  for (double x : r) segs.push_back({x, 1});
  EXPECT_NEAR(segmented_target(segs, 4.0, 0.9).value, n_step_expected_sarsa(r, 4.0, 0.9).value, 1e-15);
}

TEST(Segmented, LongSegmentsDiscountByRawSteps) {
  // Two segments of 3 and 2 raw steps, rewards pre-discounted to their first step.
  const double g = 0.9;
  const std::vector<double> raw{1, 2, 3, 4, 5};
  const double s1 = 1 + g * 2 + g * g * 3;
  const double s2 = 4 + g * 5;
  const std::vector<RewardSegment> segs{{s1, 3}, {s2, 2}};
  const NStepTarget t = segmented_target(segs, 7.0, g);
  EXPECT_EQ(t.step_length, 5u);
  EXPECT_NEAR(t.value, enumerate(raw, 7.0, g), 1e-12);
}

TEST(Averaged, SingleBranchIdentity) {
  const std::vector<NStepTarget> t{{1, 2.5}};
  EXPECT_EQ(averaged_return(t, ReturnWeights::geometric(1)), 2.5);
}

TEST(Averaged, EqualWeights) {
  const std::vector<NStepTarget> t{{1, 2.0}, {2, 4.0}};
  EXPECT_DOUBLE_EQ(averaged_return(t, ReturnWeights::geometric(2, 1.0)), 3.0);
}

TEST(Gated, SingleBranchReduction) {
  const std::vector<NStepTarget> t{{1, 2.0}, {2, 4.0}, {3, 8.0}};
  const GateVector g{{1, 0, 0}};
  EXPECT_EQ(gated_return(t, ReturnWeights::geometric(3, 0.5), g), 2.0);
}

TEST(Gated, GeometricWeightsAllOn) {
  const std::vector<NStepTarget> t{{1, 2.0}, {2, 4.0}, {3, 8.0}};
  const auto w = ReturnWeights::geometric(3, 0.5);
  EXPECT_NEAR(gated_return(t, w, GateVector::all_on(3)), 6.0 / 1.75, 1e-15);
  EXPECT_EQ(gated_return(t, w, GateVector::all_on(3)), averaged_return(t, w));
}

TEST(Gated, AllOffIsUsageError) {
  const std::vector<NStepTarget> t{{1, 2.0}, {2, 4.0}};
  EXPECT_THROW(gated_return(t, ReturnWeights::geometric(2), GateVector{{0, 0}}), UsageError);
  EXPECT_THROW(gated_return(t, ReturnWeights::geometric(3), GateVector::all_on(2)), DimensionError);
}

TEST(Gated, SkipsClosedMiddleBranch) {
  const std::vector<NStepTarget> t{{1, 1.0}, {2, 100.0}, {3, 4.0}};
  const auto w = ReturnWeights::geometric(3, 0.5);
  EXPECT_NEAR(gated_return(t, w, GateVector{{1, 0, 1}}), (1.0 + 0.25 * 4.0) / 1.25, 1e-15);
}

TEST(Weights, Geometric) {
  const auto w = ReturnWeights::geometric(4, 0.5);
  EXPECT_EQ(w.lambdas, (std::vector<double>{1.0, 0.5, 0.25, 0.125}));
  EXPECT_THROW(ReturnWeights::geometric(0), UsageError);
  EXPECT_THROW(ReturnWeights::geometric(2, 0.0), DomainError);
}
