#include <gtest/gtest.h>

#include <cmath>

#include "amtd/active_agents.hpp"
#include "amtd/baselines.hpp"
#include "amtd/envs.hpp"
#include "amtd/errors.hpp"

using namespace amtd;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  EXPECT_EQ(a.size(), b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

AgentConfig reduction_config() {
  AgentConfig c;
  c.schedule.intervals = {1};
  c.lookahead = 1;
  c.beta = 0.0;
  c.force_gates_on = true;
  c.warmup_steps = 300;
  c.batch_size = 32;
  return c;
}

double greedy_return(Agent& agent, Environment& env, std::uint64_t seed) {
  EnvState s = env.reset(seed);
  double total = 0.0;
  while (!s.done) {
    total += env.step(agent.act(s.observation, false)).reward;
    s = env.state();
  }
  return total;
}

}  // namespace

TEST(Reduction, ActiveWithUnitChunksMatchesVanillaActorCritic) {
  CliffWalking env_a, env_b;
  const AgentConfig cfg = reduction_config();
  DiscreteActiveAgent active(48, 4, cfg, 7);
  VanillaActorCritic vanilla(48, 4, cfg, 7);
  ASSERT_EQ(active.nets().parameters(), vanilla.nets().parameters());
  for (std::size_t ep = 0; ep < 12; ++ep) {
    const auto ra = active.train_episode(env_a, derive_seed(7, ep), ep);
    const auto rb = vanilla.train_episode(env_b, derive_seed(7, ep), ep);
    EXPECT_EQ(ra.train_return, rb.train_return) << "episode " << ep;
    EXPECT_LT(max_abs_diff(active.nets().parameters(), vanilla.nets().parameters()), 1e-10) << "episode " << ep;
  }
  EXPECT_GT(active.total_steps(), cfg.warmup_steps);
}

TEST(Reduction, ContinuousSingleBranchUpdateMatchesTd3) {
  Pendulum env;
  AgentConfig cfg = reduction_config();
  cfg.hidden = {16, 16};
  cfg.tau = 0.005;
  ContinuousActiveAgent active(3, env.action_space(), cfg, 3);
  DeterministicAgent td3(DeterministicAgent::Variant::td3, 3, env.action_space(), cfg, 3);
  ASSERT_EQ(active.nets().parameters(), td3.nets().parameters());

  ContinuousActiveAgent collector(3, env.action_space(), cfg, 99);
  active.buffer().push_episode(collector.run_episode_active(env, 8, 1).samples);
  const ReplayBuffer& buf = active.buffer();
  std::vector<LookaheadWindow> windows;
  std::vector<Transition> transitions;
  for (std::size_t i = 0; i < buf.size(); i += 3) {
    windows.push_back(buf.window_at(i, 1));
    const SelectedSample& s = buf.at(i);
    Transition t;
    t.state = s.state;
    t.action = s.action;
    t.reward = s.accumulated_reward;
    t.next_state = s.next_state;
    t.done = s.done;
    t.terminal = s.terminal;
    t.step_index = s.step_index;
    transitions.push_back(std::move(t));
  }
  std::vector<const Transition*> batch;
  for (const auto& t : transitions) batch.push_back(&t);
  for (int i = 0; i < 6; ++i) {
    const auto da = active.update_on_batch(windows);
    const auto db = td3.update_on_batch(batch);
    EXPECT_EQ(da.actor_updated, db.actor_updated);
    EXPECT_LT(max_abs_diff(active.nets().parameters(), td3.nets().parameters()), 1e-12) << "update " << i;
  }
}

TEST(ActiveDiscrete, ConstantRewardValueIsGeometricSum) {
  ConstantReward env(1.0, 50);
  AgentConfig cfg;
  cfg.gamma = 0.9;
  cfg.schedule.intervals = {1};
  cfg.lookahead = 3;
  cfg.warmup_steps = 100;
  cfg.batch_size = 32;
  cfg.tau = 0.05;
  DiscreteActiveAgent agent(1, 2, cfg, 1);
  for (std::size_t ep = 0; ep < 60; ++ep) agent.train_episode(env, derive_seed(1, ep), ep);
  EXPECT_NEAR(agent.state_value(Vector::Ones(1)), 1.0 / (1.0 - cfg.gamma), 0.5);
}

TEST(ActiveDiscrete, ChunkedRolloutKeepsOneSamplePerChunk) {
  ConstantReward env(1.0, 10);
  AgentConfig cfg;
  cfg.schedule.intervals = {4};
  DiscreteActiveAgent agent(1, 2, cfg, 2);
  const auto roll = agent.run_episode_active(env, 5, 4);
  ASSERT_EQ(roll.samples.size(), 3u);
  EXPECT_EQ(roll.steps, 10u);
  EXPECT_EQ(roll.episode_return, 10.0);
  std::size_t raw = 0;
  for (const auto& s : roll.samples) raw += s.segment_steps;
  EXPECT_EQ(raw, 10u);
}

TEST(ActiveDiscrete, GateFractionWithinBounds) {
  TwoRegime env;
  AgentConfig cfg;
  cfg.schedule.intervals = {1};
  cfg.lookahead = 3;
  cfg.warmup_steps = 60;
  cfg.batch_size = 16;
  DiscreteActiveAgent agent(3, 2, cfg, 4);
  for (std::size_t ep = 0; ep < 15; ++ep) {
    const auto r = agent.train_episode(env, derive_seed(4, ep), ep);
    if (!r.updates.ready) continue;
    EXPECT_GE(r.updates.gate_on_fraction, 1.0 / 3.0 - 1e-12);
    EXPECT_LE(r.updates.gate_on_fraction, 1.0 + 1e-12);
    ASSERT_EQ(r.updates.branch_gate_on.size(), 3u);
    EXPECT_DOUBLE_EQ(r.updates.branch_gate_on[0], 1.0);
  }
}

TEST(ActiveDiscrete, ForcedGatesAreAllOn) {
  TwoRegime env;
  AgentConfig cfg;
  cfg.schedule.intervals = {1};
  cfg.lookahead = 3;
  cfg.force_gates_on = true;
  DiscreteActiveAgent agent(3, 2, cfg, 5);
  agent.buffer().push_episode(agent.run_episode_active(env, 1, 1).samples);
  Rng rng(0);
  const auto batch = *agent.buffer().sample_windows(32, 3, rng);
  const auto plan = BranchPlan::build(batch, 3, cfg.gamma);
  const auto gates = agent.infer_gates(batch, plan);
  for (std::size_t w = 0; w < batch.size(); ++w) {
    EXPECT_EQ(gates[w].bits.size(), plan.windows[w].size());
    for (auto b : gates[w].bits) EXPECT_EQ(b, 1);
  }
}

TEST(BranchPlanTest, BranchCountAndDiscounts) {
  ReplayBuffer buf(100);
  std::vector<SelectedSample> ep(5);
  for (std::size_t i = 0; i < 5; ++i) {
    ep[i].state = Vector::Constant(1, static_cast<double>(i));
    ep[i].next_state = Vector::Constant(1, static_cast<double>(i + 1));
    ep[i].action = Action::discrete(0);
    ep[i].step_index = 2 * i;
    ep[i].segment_steps = 2;
    ep[i].accumulated_reward = 1.0;
    ep[i].done = i == 4;
    ep[i].terminal = i == 4;
  }
  buf.push_episode(ep);
  const double g = 0.5;
  std::vector<LookaheadWindow> batch{buf.window_at(0, 3), buf.window_at(3, 3)};
  const auto plan = BranchPlan::build(batch, 3, g);
  ASSERT_EQ(plan.windows[0].size(), 3u);
  EXPECT_DOUBLE_EQ(plan.windows[0][0].partial_return, 1.0);
  EXPECT_DOUBLE_EQ(plan.windows[0][0].discount, g * g);
  EXPECT_DOUBLE_EQ(plan.windows[0][2].partial_return, 1.0 + g * g + g * g * g * g);
  EXPECT_DOUBLE_EQ(plan.windows[0][2].discount, std::pow(g, 6));
  // Anchor 3 has one lookahead left, then the terminal sample closes a second branch.
  ASSERT_EQ(plan.windows[1].size(), 2u);
  EXPECT_TRUE(plan.windows[1][1].terminal);
  EXPECT_FALSE(plan.windows[1][0].terminal);
}

TEST(ActiveContinuous, ActorMovesOnlyOnDelayBoundaries) {
  Pendulum env;
  AgentConfig cfg;
  cfg.schedule.intervals = {2};
  cfg.lookahead = 2;
  cfg.hidden = {16};
  cfg.policy_delay = 2;
  ContinuousActiveAgent agent(3, env.action_space(), cfg, 6);
  agent.buffer().push_episode(agent.run_episode_active(env, 1, 2).samples);
  Rng rng(1);
  for (int i = 0; i < 6; ++i) {
    const auto before = agent.actor().params();
    const std::vector<double> copy(before.begin(), before.end());
    const auto d = agent.update_on_batch(*agent.buffer().sample_windows(16, 2, rng));
    const auto after = agent.actor().params();
    const bool moved = max_abs_diff(copy, std::vector<double>(after.begin(), after.end())) > 0.0;
    EXPECT_EQ(moved, agent.update_count() % 2 == 0);
    EXPECT_EQ(d.actor_updated, moved);
  }
}

TEST(Td3, ActorMovesOnlyOnDelayBoundaries) {
  Pendulum env;
  AgentConfig cfg;
  cfg.hidden = {16};
  cfg.policy_delay = 3;
  DeterministicAgent agent(DeterministicAgent::Variant::td3, 3, env.action_space(), cfg, 2);
  std::vector<Transition> data;
  EnvState s = env.reset(4);
  while (!s.done) {
    data.push_back(env.step(agent.act(s.observation, true)));
    s = env.state();
  }
  std::vector<const Transition*> batch;
  for (std::size_t i = 0; i < data.size(); i += 7) batch.push_back(&data[i]);
  for (int i = 0; i < 9; ++i) {
    const auto before = agent.actor().params();
    const std::vector<double> copy(before.begin(), before.end());
    const auto critic_before = agent.critic1().params();
    const std::vector<double> critic_copy(critic_before.begin(), critic_before.end());
    const auto d = agent.update_on_batch(batch);
    const auto after = agent.actor().params();
    const bool moved = max_abs_diff(copy, std::vector<double>(after.begin(), after.end())) > 0.0;
    EXPECT_EQ(moved, agent.update_count() % 3 == 0);
    EXPECT_EQ(d.actor_updated, moved);
    const auto critic_after = agent.critic1().params();
    EXPECT_GT(max_abs_diff(critic_copy, std::vector<double>(critic_after.begin(), critic_after.end())), 0.0);
  }
}

TEST(Agents, GreedyActionDoesNotMutate) {
  CliffWalking env;
  AgentConfig cfg;
  cfg.warmup_steps = 100;
  for (const std::string kind : {"active", "vanilla_ac", "reinforce", "dqn"}) {
    AgentPtr agent = make_agent(kind, env, cfg, 3);
    agent->train_episode(env, 2, 0);
    agent->train_episode(env, 3, 1);
    const auto params = agent->parameters();
    std::vector<std::size_t> first;
    for (std::size_t c = 0; c < 48; ++c) first.push_back(agent->act(CliffWalking::encode(c), false).index());
    for (std::size_t c = 0; c < 48; ++c) EXPECT_EQ(agent->act(CliffWalking::encode(c), false).index(), first[c]);
    EXPECT_EQ(agent->parameters(), params) << kind;
  }
}

TEST(Agents, SameSeedSameCurve) {
  TrainOptions opt;
  opt.num_episodes = 8;
  opt.eval_interval = 2;
  opt.eval_episodes = 2;
  AgentConfig cfg;
  cfg.warmup_steps = 200;
  cfg.batch_size = 16;
  cfg.schedule.intervals = {2};
  cfg.lookahead = 2;
  for (const std::string env : {"cliff_walking", "pendulum"}) {
    const auto a = train("active", env, cfg, opt, 11);
    const auto b = train("active", env, cfg, opt, 11);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].train_return, b[i].train_return) << env;
      EXPECT_EQ(a[i].eval_return, b[i].eval_return) << env;
    }
    const auto c = train("active", env, cfg, opt, 12);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i].train_return != c[i].train_return;
    EXPECT_TRUE(differs) << env;
  }
}

TEST(Reinforce, LearnsTwoArmedBandit) {
  TwoArmedBandit env;
  AgentConfig cfg;
  cfg.actor_lr = 0.05;
  Reinforce agent(1, 2, cfg, 8);
  for (std::size_t ep = 0; ep < 400; ++ep) agent.train_episode(env, ep, ep);
  EXPECT_GT(agent.policy(Vector::Ones(1))[0], 0.95);
}

TEST(Dqn, GreedyPolicyIsOptimalOnCliffWalking) {
  CliffWalking env;
  AgentConfig cfg;
  cfg.gamma = 0.99;
  cfg.critic_lr = 1e-3;
  cfg.tau = 0.01;
  cfg.batch_size = 64;
  cfg.warmup_steps = 500;
  cfg.epsilon_decay_steps = 5000;
  cfg.epsilon_end = 0.1;
  Dqn agent(48, 4, cfg, 9);
  double best = -1e9;
  for (std::size_t ep = 0; ep < 2000; ++ep) {
    agent.train_episode(env, ep, ep);
    if (ep % 10 == 9) best = std::max(best, greedy_return(agent, env, ep));
    if (best == -13.0) break;
  }
  EXPECT_EQ(best, -13.0);
}

TEST(Agents, FactoryRejectsUnsupportedPairs) {
  Pendulum pend;
  CliffWalking cliff;
  EXPECT_THROW(make_agent("dqn", pend, AgentConfig{}, 0), UnsupportedError);
  EXPECT_THROW(make_agent("td3", cliff, AgentConfig{}, 0), UnsupportedError);
  EXPECT_THROW(make_agent("nope", cliff, AgentConfig{}, 0), UsageError);
  AgentConfig bad;
  bad.gamma = 2.0;
  EXPECT_FALSE(bad.violations().empty());
}
