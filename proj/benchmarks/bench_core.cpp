#include <benchmark/benchmark.h>

#include "amtd/active_agents.hpp"
#include "amtd/envs.hpp"
#include "amtd/nn.hpp"
#include "amtd/replay.hpp"
#include "amtd/returns.hpp"

using namespace amtd;

namespace {

Matrix random_batch(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng, 0.0, 1.0);
  return m;
}

void BM_MlpForward(benchmark::State& state) {
  Rng rng(1);
  Network net = Network::mlp({4, 64, 64, 1}, Activation::relu, Activation::identity);
  net.init_uniform(rng);
  const Matrix x = random_batch(4, static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForward)->Arg(1)->Arg(100)->Arg(256);

void BM_MlpBackward(benchmark::State& state) {
  Rng rng(2);
  Network net = Network::mlp({4, 64, 64, 1}, Activation::relu, Activation::identity);
  net.init_uniform(rng);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix x = random_batch(4, n, rng);
  const Matrix g = random_batch(1, n, rng);
  std::vector<double> grad(net.num_params());
  for (auto _ : state) {
    GradTape tape;
    net.forward(x, tape);
    net.backward(tape, g, grad);
    benchmark::DoNotOptimize(grad.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpBackward)->Arg(1)->Arg(100)->Arg(256);

void BM_GatedReturn(benchmark::State& state) {
  const auto l = static_cast<std::size_t>(state.range(0));
  std::vector<NStepTarget> targets;
  for (std::size_t j = 0; j < l; ++j) targets.push_back({j + 1, 1.0 + 0.1 * static_cast<double>(j)});
  const auto weights = ReturnWeights::geometric(l);
  GateVector gates = GateVector::all_on(l);
  for (std::size_t j = 1; j < l; j += 2) gates.bits[j] = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gated_return(targets, weights, gates));
}
BENCHMARK(BM_GatedReturn)->Arg(3)->Arg(10);

void BM_ReplaySample(benchmark::State& state) {
  ReplayBuffer buf(100'000);
  std::vector<SelectedSample> episode(200);
  for (std::size_t i = 0; i < episode.size(); ++i) {
    episode[i].state = Vector::Zero(3);
    episode[i].next_state = Vector::Zero(3);
    episode[i].action = Action::discrete(0);
    episode[i].step_index = i;
    episode[i].done = i + 1 == episode.size();
  }
  for (int e = 0; e < 250; ++e) buf.push_episode(episode);
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(buf.sample_windows(100, static_cast<std::size_t>(state.range(0)), rng));
}
BENCHMARK(BM_ReplaySample)->Arg(1)->Arg(3);

template <class Env>
void BM_EnvStep(benchmark::State& state) {
  Env env;
  Rng rng(4);
  const ActionSpace space = env.action_space();
  env.reset(5);
  std::uint64_t episode = 0;
  for (auto _ : state) {
    if (env.state().done) env.reset(++episode);
    benchmark::DoNotOptimize(env.step(space.sample(rng)));
  }
}
BENCHMARK(BM_EnvStep<CliffWalking>);
BENCHMARK(BM_EnvStep<CartPole>);
BENCHMARK(BM_EnvStep<Pendulum>);

void BM_ActiveUpdate(benchmark::State& state) {
  AgentConfig cfg;
  cfg.schedule.intervals = {1};
  cfg.lookahead = static_cast<std::size_t>(state.range(0));
  cfg.warmup_steps = 0;
  CartPole env;
  DiscreteActiveAgent agent(4, 2, cfg, 6);
  for (std::size_t ep = 0; ep < 5; ++ep) agent.train_episode(env, ep, ep);
  for (auto _ : state) benchmark::DoNotOptimize(agent.update_adaptive(1));
}
BENCHMARK(BM_ActiveUpdate)->Arg(1)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
