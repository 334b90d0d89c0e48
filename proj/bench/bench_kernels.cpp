// Serial reference kernels versus their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "tandem/fixed_sample.hpp"
#include "tandem/montecarlo.hpp"

namespace {

using tandem::Execution;
using tandem::GaussianModel;

void BM_GridXyx(benchmark::State& state) {
  const GaussianModel model(1.0, 1.0);
  tandem::SearchConfig search;
  search.parallel = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tandem::grid_optimize_xyx(model, 0.2, search).point.pd);
  }
}
BENCHMARK(BM_GridXyx)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_GridYx(benchmark::State& state) {
  const GaussianModel model(1.0, 1.0);
  tandem::SearchConfig search;
  search.parallel = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tandem::grid_optimize_yx(model, 0.2, search).point.pd);
  }
}
BENCHMARK(BM_GridYx)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_SimulateXyx(benchmark::State& state) {
  const GaussianModel model(1.0, 1.0);
  const tandem::XyxThresholds thr{0.5, {0.7, 0.3}, {{{0.6, 1.0}, {0.2, 0.4}}}};
  const Execution exec = state.range(0) != 0 ? Execution::Parallel : Execution::Serial;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tandem::simulate_fixed(model, thr, 1 << 20, 7, exec).pd.value);
  }
  state.SetItemsProcessed(state.iterations() * 2 * (1 << 20));
}
BENCHMARK(BM_SimulateXyx)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_Exponent(benchmark::State& state) {
  const GaussianModel model(1.0, 1.0);
  const Execution exec = state.range(0) != 0 ? Execution::Parallel : Execution::Serial;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tandem::estimate_exponent(model, 0.2, 2000, 200, 7, exec).value);
  }
}
BENCHMARK(BM_Exponent)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
