// Kernel timings: one environment iteration, the gate application and a
// full truncation step, over the coordination numbers and bond dimensions
// used in production sweeps.

#include <benchmark/benchmark.h>

#include "bethe/environment.hpp"
#include "bethe/evolution.hpp"
#include "bethe/gates.hpp"
#include "bethe/state.hpp"

namespace {

using namespace bethe;

void BM_EnvironmentIteration(benchmark::State& st) {
  const auto q = static_cast<Index>(st.range(0));
  const auto D = static_cast<Index>(st.range(1));
  const ITTNState s = random_symmetric_state(q, D, 1);
  Matrix R = random_psd_seed(D, 2);
  for (auto _ : st) {
    R = environment_map(s, R);
    R /= R.norm();
    benchmark::DoNotOptimize(R.data());
  }
  st.counters["D"] = static_cast<double>(D);
}
BENCHMARK(BM_EnvironmentIteration)
    ->Args({3, 8})->Args({3, 16})->Args({3, 32})
    ->Args({4, 8})->Args({4, 16})
    ->Unit(benchmark::kMicrosecond);

void BM_ApplyGate(benchmark::State& st) {
  const auto q = static_cast<Index>(st.range(0));
  const auto D = static_cast<Index>(st.range(1));
  const ITTNState s = random_symmetric_state(q, D, 3);
  const GateSet g = build_gate_set(1.0, 2.0, 0.025, q);
  for (auto _ : st) benchmark::DoNotOptimize(apply_gate(s, g));
}
BENCHMARK(BM_ApplyGate)->Args({3, 8})->Args({3, 16})->Args({4, 8})->Unit(benchmark::kMicrosecond);

// One imaginary-time step on a physical state: gate, environment of the
// doubled bond, projection and renormalization.
void BM_TrotterStep(benchmark::State& st) {
  const auto q = static_cast<Index>(st.range(0));
  const auto D = static_cast<Index>(st.range(1));
  EvolveConfig cfg;
  cfg.h = 2.0;
  cfg.bond_dim = D;
  cfg.total_time = 2.0;
  cfg.steps = 40;
  cfg.early_stop = false;
  cfg.track_correlation = false;
  cfg.environment.anderson_depth = 8;
  const EvolveResult warm = evolve(init_product(q, 1.5), cfg);
  const GateSet g = build_gate_set(1.0, 2.0, 0.025, q);
  TruncateOptions opt;
  opt.environment.anderson_depth = 8;
  for (auto _ : st) {
    benchmark::DoNotOptimize(truncate(apply_gate(warm.state, g), D, opt));
  }
}
BENCHMARK(BM_TrotterStep)->Args({3, 8})->Args({3, 16})->Args({4, 8})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
