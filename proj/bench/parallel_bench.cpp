// Serial reference vs OpenMP work-sharing on the two hot paths: exact drift
// evaluation over a certificate corpus and Monte Carlo one-step batches.
#include <benchmark/benchmark.h>

#include "circlepoll/corpus.hpp"
#include "circlepoll/parallel.hpp"
#include "circlepoll/simulate.hpp"

namespace {

using namespace circlepoll;

system_params reference_params() {
  return system_params(0.5, 0.1, 1.0, interpolling_distribution::exponential(1.0));
}

void bm_drift_certificate(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  const system_params params = reference_params();
  const energy_params ep(0.2, 1.0);
  for (auto _ : state) {
    const drift_certificate cert = run_drift_certificate(params, ep, 64, 20260814, threads);
    benchmark::DoNotOptimize(cert.min_margin);
  }
}

void bm_lemma_checks(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  check_options opts;
  opts.trials = 2048;
  opts.threads = threads;
  for (auto _ : state) {
    const auto results = run_lemma_checks(opts);
    benchmark::DoNotOptimize(results.back().worst);
  }
}

void bm_drift_monte_carlo(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  const system_params params = reference_params();
  const energy_params ep(0.2, 1.0);
  configuration z(1.0);
  z.insert(0.1, 3);
  z.insert(0.4, 2);
  z.insert(0.8, 1);
  for (auto _ : state) {
    const mc_estimate est = drift_monte_carlo(z, params, path_functional::energy, 1 << 16, 7, &ep, 1.0, threads);
    benchmark::DoNotOptimize(est.estimate);
  }
}

}  // namespace

BENCHMARK(bm_drift_certificate)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_lemma_checks)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_drift_monte_carlo)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
