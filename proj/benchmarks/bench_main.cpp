#include <benchmark/benchmark.h>

#include "jnt/crossval.hpp"
#include "jnt/polyfit.hpp"
#include "jnt/simulate.hpp"
#include "jnt/trend.hpp"

namespace {

const jnt::Dataset& reference_dataset() {
  static const jnt::Dataset ds = jnt::simulate_dataset(jnt::SimConfig{});
  return ds;
}

void BM_PooledFit(benchmark::State& state) {
  const auto pooled = jnt::pool_ratio(reference_dataset(), 1.4e6);
  const jnt::PolyModel model{static_cast<int>(state.range(0)), 1e6};
  for (auto _ : state) benchmark::DoNotOptimize(jnt::fit(model, pooled, 1.25e6));
}
BENCHMARK(BM_PooledFit)->Arg(2)->Arg(8)->Arg(14);

// One five-way split evaluated for every candidate order.
void BM_CvSplit(benchmark::State& state) {
  const auto corrected = jnt::correct_spectra(reference_dataset());
  const std::vector<int> orders{2, 4, 6, 8, 10, 12, 14};
  const jnt::CvEngine engine(corrected, corrected, static_cast<double>(state.range(0)) * 1e3, orders);
  std::vector<double> cv(engine.orders().size());
  std::size_t i = 0;
  for (auto _ : state) {
    engine.evaluate(jnt::split_for(reference_dataset().run_count(), 1, 1.25e6, i++), cv);
    benchmark::DoNotOptimize(engine.select(cv));
  }
}
BENCHMARK(BM_CvSplit)->Arg(300)->Arg(1250);

void BM_SelectionFractions(benchmark::State& state) {
  jnt::CvConfig cv;
  cv.n_splits = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(jnt::selection_fractions(reference_dataset(), cv, 1.25e6));
}
BENCHMARK(BM_SelectionFractions)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_BootstrapTrend(benchmark::State& state) {
  const auto offsets = jnt::per_run_offsets(reference_dataset(), {8, 1e6}, 1.25e6);
  for (auto _ : state)
    benchmark::DoNotOptimize(jnt::bootstrap_trend(offsets, static_cast<std::size_t>(state.range(0)), 5));
}
BENCHMARK(BM_BootstrapTrend)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
