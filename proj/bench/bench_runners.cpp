// Serial reference vs OpenMP runners: closed-loop basin sampling and a small
// scenario ensemble. Run with --benchmark_filter to pick one.

#include <benchmark/benchmark.h>

#include "confab/continuation.hpp"
#include "confab/training.hpp"

using namespace confab;

namespace {

RCConfig bench_config() {
  RCConfig c = RCConfig::task1();
  c.N = 100;
  c.t_listen = 20.0;
  c.t_train = 60.0;
  c.t_trans = 80.0;
  c.t_predict = 110.0;
  return c;
}

struct BasinFixture {
  GroundTruth truth;
  Network net;
  Readout readout;
  std::vector<Vec> states;
  OutputClassifier classify;

  BasinFixture() : truth(lorenz_ground_truth(bench_config())) {
    const RCConfig c = bench_config();
    net = build_network(c);
    readout = train_single(truth.signal, c, net).readout;
    states = draw_initial_states(c.N, 16, ic_seed_base(1));
    classify = reference_classifier(truth.ref);
  }
};

const BasinFixture& basin_fixture() {
  static const BasinFixture f;
  return f;
}

void BM_basin_serial(benchmark::State& st) {
  const auto& f = basin_fixture();
  const auto flow = bias_family(f.net, f.readout, bench_config())(0.0);
  const BasinRun run{0.01, 40.0, 30.0};
  for (auto _ : st) benchmark::DoNotOptimize(basin_outputs_serial(*flow, f.states, run, f.classify));
}

void BM_basin_parallel(benchmark::State& st) {
  const auto& f = basin_fixture();
  const auto flow = bias_family(f.net, f.readout, bench_config())(0.0);
  const BasinRun run{0.01, 40.0, 30.0};
  const int threads = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(basin_outputs_parallel(*flow, f.states, run, f.classify, threads));
}

EnsembleSpec ensemble_spec() {
  EnsembleSpec s;
  s.base = bench_config();
  s.base.N = 60;
  s.rho_grid = {0.0, 0.5};
  s.n_matrices = 4;
  s.n_ic = 4;
  return s;
}

void BM_ensemble_serial(benchmark::State& st) {
  const EnsembleSpec s = ensemble_spec();
  for (auto _ : st) benchmark::DoNotOptimize(scenario_ensemble_serial(s));
}

void BM_ensemble_parallel(benchmark::State& st) {
  const EnsembleSpec s = ensemble_spec();
  const int threads = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(scenario_ensemble_parallel(s, threads));
}

}  // namespace

BENCHMARK(BM_basin_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_basin_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ensemble_serial)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK(BM_ensemble_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
