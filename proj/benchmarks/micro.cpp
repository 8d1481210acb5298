#include <benchmark/benchmark.h>

#include "neuropong/experiment.hpp"
#include "neuropong/plasticity.hpp"
#include "neuropong/snn.hpp"

namespace {

using namespace neuropong;

struct Fixture {
  ExperimentConfig cfg;
  Setup setup;
  SpikeTrain input;
  TrialResult trial;

  explicit Fixture(std::size_t n_output) {
    cfg.env.n_columns = 32;
    setup = make_setup(cfg);
    if (n_output != 32) {
      setup.population = Population::uniform(cfg.neuron, n_output);
      SynapseMatrix w(32, n_output);
      for (std::size_t i = 0; i < 32; ++i)
        for (std::size_t j = 0; j < n_output; ++j) w.set(i, j, setup.initial_weights(i, j % 32));
      setup.initial_weights = w;
    }
    input = poisson_encode(5, 32, cfg.sim.rate_hi_hz, cfg.sim.rate_lo_hz, cfg.sim.trial_duration_ms, 11);
    trial = run_trial(setup.initial_weights, setup.population, input, cfg.sim, cfg.noise, 12);
  }
};

void BM_RunTrial(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto r = run_trial(f.setup.initial_weights, f.setup.population, f.input, f.cfg.sim, f.cfg.noise, ++seed);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_RunTrial)->Arg(32)->Arg(64)->Arg(128);

void BM_AccumulateTraces(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto e = accumulate_traces(f.input, f.trial.output, f.cfg.kernel, 32, f.setup.population.size(),
                               f.cfg.traces);
    benchmark::DoNotOptimize(e);
  }
}
BENCHMARK(BM_AccumulateTraces)->Arg(32)->Arg(64)->Arg(128);

void BM_RstdpUpdate(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  const auto e = digitize(accumulate_traces(f.input, f.trial.output, f.cfg.kernel, 32,
                                            f.setup.population.size(), f.cfg.traces));
  for (auto _ : state) {
    auto w = rstdp_update(f.setup.initial_weights, e, 1.0, 0.4, f.cfg.rstdp);
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_RstdpUpdate)->Arg(32)->Arg(64)->Arg(128);

void BM_ClosedLoopIteration(benchmark::State& state) {
  ExperimentConfig cfg;
  const Setup setup = make_setup(cfg);
  LoopState loop{setup.initial_weights,
                 RewardBaseline::make(cfg.rstdp.baseline_mode, 32, cfg.initial_baseline),
                 Rng(1)};
  std::size_t it = 0;
  for (auto _ : state) {
    auto log = run_iteration(loop, setup.population, it % 32, it, cfg);
    benchmark::DoNotOptimize(log);
    ++it;
  }
}
BENCHMARK(BM_ClosedLoopIteration);

}  // namespace

BENCHMARK_MAIN();
