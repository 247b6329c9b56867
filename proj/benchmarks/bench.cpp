#include <benchmark/benchmark.h>

#include <memory>
#include <string>

#include "ellis/envelope.hpp"
#include "ellis/hyperspace.hpp"
#include "ellis/symbolic.hpp"

using namespace ellis;

static void BM_SquareMapApproxEnvelope(benchmark::State& state) {
  auto model = std::make_shared<const CascadeModel>(
      load_example("square-map", {{"grid", std::to_string(state.range(0))}}));
  ApproxOptions o;
  o.horizon = 60;
  o.tau = 1e-3;
  o.range = PowerRange::two_sided;
  for (auto _ : state) benchmark::DoNotOptimize(approx_envelope(model, o).size());
}
BENCHMARK(BM_SquareMapApproxEnvelope)->Arg(201)->Arg(1001)->Arg(4001)->Unit(benchmark::kMillisecond);

static void BM_PeriodicStackExactEnvelope(benchmark::State& state) {
  auto model = std::make_shared<const CascadeModel>(
      load_example("periodic-stack", {{"n", "3"}, {"truncate", std::to_string(state.range(0))}}));
  for (auto _ : state) benchmark::DoNotOptimize(exact_envelope(model).size());
}
BENCHMARK(BM_PeriodicStackExactEnvelope)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_GoldenMeanCount(benchmark::State& state) {
  auto shift = Subshift::golden_mean();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(count_words(shift, n));
}
BENCHMARK(BM_GoldenMeanCount)->Arg(12)->Arg(20);

static void BM_GoldenMeanTransfer(benchmark::State& state) {
  auto shift = Subshift::golden_mean();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(transfer_count(shift, n));
}
BENCHMARK(BM_GoldenMeanTransfer)->Arg(20)->Arg(60);

static void BM_HyperBuild(benchmark::State& state) {
  auto base = discretize(load_example("square-map", {{"grid", std::to_string(state.range(0))}}));
  for (auto _ : state) benchmark::DoNotOptimize(build_hyper_model(base, 2).model().size());
}
BENCHMARK(BM_HyperBuild)->Arg(11)->Arg(31)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
