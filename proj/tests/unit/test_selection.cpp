#include <gtest/gtest.h>

#include <cmath>

#include "amtd/errors.hpp"
#include "amtd/selection.hpp"

using namespace amtd;

namespace {

Transition make_transition(std::size_t t, double reward, bool last, bool terminal) {
  Transition tr;
  tr.state = Vector::Constant(1, static_cast<double>(t));
  tr.action = Action::discrete(t % 2);
  tr.reward = reward;
  tr.step_index = t;
  tr.next_state = Vector::Constant(1, static_cast<double>(t + 1));
  tr.done = last;
  tr.terminal = last && terminal;
  return tr;
}

std::vector<SelectedSample> run_selector(std::size_t k, double gamma, const std::vector<double>& rewards,
                                         const std::vector<double>& scores, bool terminal = true) {
  ChunkSelector sel(k, gamma);
  for (std::size_t t = 0; t < rewards.size(); ++t) {
    sel.observe(make_transition(t, rewards[t], t + 1 == rewards.size(), terminal), scores[t]);
  }
  return sel.finish();
}

}  // namespace

TEST(ScoreDiscrete, DeterministicPolicyZeroTd) {
  const std::vector<double> pi{0.0, 1.0, 0.0, 0.0};
  EXPECT_EQ(score_discrete(0.0, pi, 0.1, 0).value, 0.0);
}

TEST(ScoreDiscrete, UniformPolicyEntropy) {
  const std::vector<double> pi(4, 0.25);
  EXPECT_NEAR(score_discrete(0.0, pi, 0.1, 0).value, 0.1 * std::log(4.0), 1e-15);
  EXPECT_NEAR(score_discrete(0.0, pi, 0.1, 0).value, 0.1386, 1e-4);
}

TEST(ScoreDiscrete, BetaZeroIsSquaredTd) {
  const std::vector<double> pi{0.3, 0.7};
  EXPECT_EQ(score_discrete(-1.7, pi, 0.0, 5).value, 1.7 * 1.7);
  EXPECT_EQ(score_discrete(-1.7, pi, 0.0, 5).step_index, 5u);
}

TEST(ScoreContinuous, BetaZeroAndMeanAction) {
  EXPECT_EQ(score_continuous(0.5, 123.0, 0.0, 0).value, 0.25);
  Rng rng(1);
  Network actor = Network::mlp({3, 8, 2}, Activation::relu, Activation::tanh);
  actor.init_uniform(rng);
  const Vector s = Vector::LinSpaced(3, -0.5, 0.5);
  const Vector center = Vector::Zero(2), half = Vector::Constant(2, 2.0), sigma = Vector::Constant(2, 0.2);
  const Vector mean = center + half.cwiseProduct(actor.forward(Matrix(s)).col(0));
  const double g = gaussian_log_policy_grad_norm_sq(actor, s, mean, center, half, sigma);
  EXPECT_NEAR(g, 0.0, 1e-24);
  EXPECT_EQ(score_continuous(0.5, g, 0.1, 0).value, 0.25 + 0.1 * g);
}

TEST(ScoreContinuous, GradientNormMatchesFiniteDifferences) {
  Rng rng(2);
  Network actor = Network::mlp({3, 6, 1}, Activation::tanh, Activation::tanh);
  actor.init_uniform(rng);
  const Vector s = Vector::LinSpaced(3, -0.3, 0.8);
  const Vector center = Vector::Constant(1, 0.5), half = Vector::Constant(1, 2.0), sigma = Vector::Constant(1, 0.3);
  const Vector a = Vector::Constant(1, 1.1);
  const double want = gaussian_log_policy_grad_norm_sq(actor, s, a, center, half, sigma);
  double fd_sq = 0.0;
  const double h = 1e-6;
  for (std::size_t i = 0; i < actor.num_params(); ++i) {
    auto p = actor.params();
    const double keep = p[i];
    p[i] = keep + h;
    const double up = gaussian_log_density(actor, s, a, center, half, sigma);
    p[i] = keep - h;
    const double down = gaussian_log_density(actor, s, a, center, half, sigma);
    p[i] = keep;
    fd_sq += std::pow((up - down) / (2 * h), 2);
  }
  EXPECT_GT(want, 0.0);
  EXPECT_LT(std::abs(fd_sq - want) / want, 1e-4);
}

TEST(SelectInChunk, ArgmaxEarliestTie) {
  const std::vector<SelectionScore> s{{0, 0.1}, {1, 0.9}, {2, 0.3}};
  EXPECT_EQ(select_in_chunk(s), 1u);
  const std::vector<SelectionScore> one{{0, 4.0}};
  EXPECT_EQ(select_in_chunk(one), 0u);
  const std::vector<SelectionScore> flat{{0, 2.0}, {1, 2.0}, {2, 2.0}};
  EXPECT_EQ(select_in_chunk(flat), 0u);
  EXPECT_THROW(select_in_chunk(std::span<const SelectionScore>()), UsageError);
}

TEST(SelectInChunk, ShiftInvariance) {
  Rng rng(3);
  for (int c = 0; c < 1000; ++c) {
    std::vector<SelectionScore> s(1 + uniform_index(rng, 10));
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = {i, std::floor(uniform(rng, 0, 8))};
    const double shift = std::floor(uniform(rng, -100, 100));
    auto shifted = s;
    for (auto& x : shifted) x.value += shift;
    EXPECT_EQ(select_in_chunk(s), select_in_chunk(shifted));
  }
}

TEST(Schedule, CurrentInterval) {
  ChunkSchedule s;
  s.intervals = {8, 4, 1};
  s.mode = ScheduleMode::coarse_to_fine;
  EXPECT_EQ(current_interval(s, 0), 8u);
  EXPECT_EQ(current_interval(s, 4), 4u);
  EXPECT_EQ(current_interval(s, 2), 1u);
  ChunkSchedule fixed;
  fixed.intervals = {4};
  for (std::size_t e : {0u, 7u, 1000u}) EXPECT_EQ(current_interval(fixed, e), 4u);
  s.episodes_per_interval = 2;
  EXPECT_EQ(current_interval(s, 3), 4u);
}

TEST(Schedule, Violations) {
  ChunkSchedule s;
  s.intervals = {8, 4, 1};
  s.mode = ScheduleMode::coarse_to_fine;
  EXPECT_TRUE(s.violations(200).empty());
  EXPECT_FALSE(s.violations(8).empty());
  s.intervals = {4, 8, 1};
  EXPECT_FALSE(s.violations(200).empty());
  s.mode = ScheduleMode::fine_to_coarse;
  s.intervals = {1, 2, 4};
  EXPECT_TRUE(s.violations(200).empty());
  s.mode = ScheduleMode::fixed;
  EXPECT_FALSE(s.violations(200).empty());
  s.intervals = {0};
  EXPECT_FALSE(s.violations(200).empty());
  EXPECT_EQ(schedule_mode_from_string(to_string(ScheduleMode::fine_to_coarse)), ScheduleMode::fine_to_coarse);
}

TEST(ChunkSelector, IntervalOneKeepsEveryStep) {
  const std::vector<double> r{1, -2, 3, 0.5, 7};
  const auto out = run_selector(1, 0.9, r, std::vector<double>(5, 0.0));
  ASSERT_EQ(out.size(), 5u);
  for (std::size_t t = 0; t < 5; ++t) {
    EXPECT_EQ(out[t].step_index, t);
    EXPECT_EQ(out[t].accumulated_reward, r[t]);
    EXPECT_EQ(out[t].segment_steps, 1u);
    EXPECT_EQ(out[t].next_state[0], static_cast<double>(t + 1));
  }
  EXPECT_TRUE(out.back().done);
  EXPECT_TRUE(out.back().terminal);
}

TEST(ChunkSelector, TenStepsIntervalFour) {
  const std::vector<double> r(10, 1.0);
  std::vector<double> scores{0, 5, 1, 2, 3, 1, 9, 0, 1, 1};
  const auto out = run_selector(4, 1.0, r, scores);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].step_index, 1u);
  EXPECT_EQ(out[1].step_index, 6u);
  EXPECT_EQ(out[2].step_index, 8u);
  double total = 0.0;
  for (const auto& s : out) total += s.accumulated_reward;
  EXPECT_EQ(total, 10.0 - 1.0);  // the step before the first winner precedes every segment
  EXPECT_EQ(out[0].next_state, out[1].state);
  EXPECT_TRUE(out[2].terminal);
}

TEST(ChunkSelector, SegmentsPartitionTheEpisodeWhenFirstStepWins) {
  Rng rng(4);
  const std::vector<double> r{2, -1, 0.5, 4, -3, 1, 1};
  std::vector<double> scores{10, 0, 0, 10, 0, 0, 10};
  const auto out = run_selector(3, 1.0, r, scores);
  double total = 0.0;
  for (const auto& s : out) total += s.accumulated_reward;
  EXPECT_NEAR(total, 2 - 1 + 0.5 + 4 - 3 + 1 + 1, 1e-15);
}

TEST(ChunkSelector, AccumulatedRewardMatchesDirectSum) {
  Rng rng(5);
  const double gamma = 0.93;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t len = 1 + uniform_index(rng, 40);
    const std::size_t k = 1 + uniform_index(rng, 6);
    std::vector<double> r(len), sc(len);
    for (std::size_t t = 0; t < len; ++t) {
      r[t] = uniform(rng, -2, 2);
      sc[t] = uniform(rng, 0, 1);
    }
    const auto out = run_selector(k, gamma, r, sc, false);
    EXPECT_EQ(out.size(), (len + k - 1) / k);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const std::size_t end = i + 1 < out.size() ? out[i + 1].step_index : len;
      double direct = 0.0;
      for (std::size_t t = out[i].step_index; t < end; ++t) {
        direct += std::pow(gamma, static_cast<double>(t - out[i].step_index)) * r[t];
      }
      EXPECT_NEAR(out[i].accumulated_reward, direct, 1e-12);
      EXPECT_EQ(out[i].segment_steps, end - out[i].step_index);
    }
    EXPECT_FALSE(out.back().terminal);
    EXPECT_TRUE(out.back().done);
  }
}

TEST(ChunkSelector, RejectsBadInput) {
  EXPECT_THROW(ChunkSelector(0, 0.9), UsageError);
  ChunkSelector sel(2, 0.9);
  sel.observe(make_transition(0, 1, false, false), 0.0);
  EXPECT_THROW(sel.observe(make_transition(2, 1, false, false), 0.0), UsageError);
  EXPECT_THROW(sel.observe(make_transition(1, 1, false, false), std::nan("")), NumericError);
}
