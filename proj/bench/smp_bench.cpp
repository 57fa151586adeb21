// Serial reference versus the parallel kernels. The parallel variants take the
// worker count as the benchmark argument.

#include "smp/eval.hpp"
#include "smp/ga.hpp"
#include "smp/models/forest.hpp"
#include "smp/models/spec.hpp"

#include "support/synthetic.hpp"

#include <benchmark/benchmark.h>

using namespace smp;

namespace {

const synth::Problem& problem() {
  static const auto p = synth::friedman(300, 10, 11);
  return p;
}

ingest::Dataset dataset() {
  ingest::Dataset d;
  d.name = "friedman";
  d.features = problem().x;
  d.target = problem().y;
  for (Eigen::Index j = 0; j < d.features.cols(); ++j) d.feature_names.push_back("x" + std::to_string(j));
  for (Eigen::Index i = 0; i < d.features.rows(); ++i) d.row_ids.push_back(static_cast<std::size_t>(i));
  return d;
}

void BM_ForestSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(models::grow_forest_serial(problem().x, problem().y, {}, 7));
  }
}
BENCHMARK(BM_ForestSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ForestParallel(benchmark::State& state) {
  const Exec exec{static_cast<int>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(models::grow_forest(problem().x, problem().y, {}, 7, exec));
  }
}
BENCHMARK(BM_ForestParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_CrossValidateSerial(benchmark::State& state) {
  const auto d = dataset();
  const auto plan = ingest::kfold_split(d.instances(), 10, 3);
  const auto spec = models::default_spec(models::Technique::cart, 5);
  for (auto _ : state) benchmark::DoNotOptimize(eval::cross_validate_serial(spec, d, plan));
}
BENCHMARK(BM_CrossValidateSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_CrossValidateParallel(benchmark::State& state) {
  const auto d = dataset();
  const auto plan = ingest::kfold_split(d.instances(), 10, 3);
  const auto spec = models::default_spec(models::Technique::cart, 5);
  const Exec exec{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(eval::cross_validate(spec, d, plan, exec));
}
BENCHMARK(BM_CrossValidateParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

ga::GaConfig small_ga() {
  ga::GaConfig cfg;
  cfg.population_size = 8;
  cfg.max_generations = 3;
  cfg.bounds.trees_max = 30;
  return cfg;
}

void BM_GarfSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ga::run_garf(problem().x, problem().y, small_ga(), Exec::sequential()));
}
BENCHMARK(BM_GarfSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_GarfParallel(benchmark::State& state) {
  const Exec exec{static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(ga::run_garf(problem().x, problem().y, small_ga(), exec));
}
BENCHMARK(BM_GarfParallel)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
