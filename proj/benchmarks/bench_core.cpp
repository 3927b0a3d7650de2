#include <benchmark/benchmark.h>

#include <random>

#include "mfrl/adaptive.hpp"
#include "mfrl/env.hpp"
#include "mfrl/mlp.hpp"
#include "mfrl/policy.hpp"

namespace {

using namespace mfrl;

void BM_MlpForward(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const MlpParams net = make_mlp_random(
      {4, 64, 32, 1},
      {Activation::ReLU, Activation::ReLU, Activation::Linear}, rng);
  const std::vector<double> x{0.2, 0.4, 0.6, 0.8};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mlp_forward(net, x));
  }
}
BENCHMARK(BM_MlpForward);

void BM_MlpBackward(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const MlpParams net = make_mlp_random(
      {4, 64, 32, 1},
      {Activation::ReLU, Activation::ReLU, Activation::Linear}, rng);
  const std::vector<double> x{0.2, 0.4, 0.6, 0.8};
  const std::vector<double> upstream{1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mlp_backward(net, x, upstream));
  }
}
BENCHMARK(BM_MlpBackward);

void BM_ComputeGae(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> rewards(n, 0.1);
  std::vector<double> values(n, 0.05);
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_gae(rewards, values, 0.0, 0.99, 0.95));
  }
}
BENCHMARK(BM_ComputeGae)->Arg(20)->Arg(400);

void BM_ChooseModel(benchmark::State& state) {
  std::mt19937_64 rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(choose_model(0.6, 0.3, 0.1, 0.5, rng));
  }
}
BENCHMARK(BM_ChooseModel);

void BM_HfEvaluate(benchmark::State& state) {
  const DesignVector x = make_design({0.3, 0.5, 0.7, 0.2});
  for (auto _ : state) {
    benchmark::DoNotOptimize(hf_evaluate(x));
  }
}
BENCHMARK(BM_HfEvaluate);

void BM_SampleAction(benchmark::State& state) {
  std::mt19937_64 init(4);
  const Agent agent = make_agent({64, 64}, 0.1, 3e-4, init);
  const DesignVector s = make_design({0.5, 0.5, 0.5, 0.5});
  std::mt19937_64 rng(5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_action(agent.policy, s, rng));
  }
}
BENCHMARK(BM_SampleAction);

void BM_PpoUpdate(benchmark::State& state) {
  std::mt19937_64 init(6);
  Agent agent = make_agent({64, 64}, 0.1, 3e-4, init);
  const DesignVector s = make_design({0.5, 0.5, 0.5, 0.5});
  std::mt19937_64 rng(7);
  PpoBatch batch;
  for (int i = 0; i < 400; ++i) {
    const ActionSample smp = sample_action(agent.policy, s, rng);
    batch.push_back(PpoSample{s, smp.action, smp.log_prob,
                              (i % 2 == 0) ? 1.0 : -1.0, 0.0});
  }
  normalize_advantages(batch);
  PpoConfig cfg;
  std::mt19937_64 shuffle(8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ppo_update(agent, batch, cfg, shuffle));
  }
}
BENCHMARK(BM_PpoUpdate);

void BM_AugmentHfBuffer(benchmark::State& state) {
  for (auto _ : state) {
    state.PauseTiming();
    BufferSet buffers;
    std::optional<FidelityId> prev;
    for (int t = 0; t < 400; ++t) {
      Transition tr;
      tr.model = FidelityId::LF1;
      tr.aligned = (t / 3) % 2 == 0;
      record_transition(buffers, t / 20, t % 20,
                        (t % 20 == 0) ? std::nullopt : prev, tr);
      prev = tr.model;
    }
    state.ResumeTiming();
    benchmark::DoNotOptimize(augment_hf_buffer(buffers));
  }
}
BENCHMARK(BM_AugmentHfBuffer);

}  // namespace

BENCHMARK_MAIN();
