#include <benchmark/benchmark.h>

#include <random>

#include "gasrank/estimation.hpp"
#include "gasrank/gas_filter.hpp"
#include "gasrank/plackett_luce.hpp"
#include "gasrank/prediction.hpp"
#include "gasrank/simulation.hpp"

namespace {

using namespace gasrank;

std::vector<double> worths(std::size_t n) {
  Rng rng(1);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> f(n);
  for (double& v : f) v = z(rng);
  return f;
}

void BM_LogPmf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto f = worths(n);
  Rng rng(2);
  const Ranking y = sample(f, n * 2 / 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(log_pmf(y, f));
}
BENCHMARK(BM_LogPmf)->Arg(6)->Arg(24)->Arg(100);

void BM_Score(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto f = worths(n);
  Rng rng(2);
  const Ranking y = sample(f, n * 2 / 3, rng);
  for (auto _ : state) benchmark::DoNotOptimize(score(y, f));
}
BENCHMARK(BM_Score)->Arg(6)->Arg(24)->Arg(100);

void BM_FilteredLoglik(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ModelSpec spec = ModelSpec::make(Variant::kMeanReverting, n, 1);
  const ParameterVector p = design_parameters(spec);
  Rng rng(3);
  const auto panel = simulate_panel(p, spec, 22, rng, {.top = n * 2 / 3});
  for (auto _ : state) benchmark::DoNotOptimize(filtered_loglik(p, spec, panel.data));
}
BENCHMARK(BM_FilteredLoglik)->Arg(10)->Arg(24);

void BM_FitMeanReverting(benchmark::State& state) {
  const ModelSpec spec = ModelSpec::make(Variant::kMeanReverting, 20, 1);
  Rng rng(4);
  const auto panel = simulate_panel(design_parameters(spec), spec, 20, rng);
  for (auto _ : state) benchmark::DoNotOptimize(fit(panel.data, spec).loglik);
}
BENCHMARK(BM_FitMeanReverting)->Unit(benchmark::kMillisecond);

void BM_PodiumProbability(benchmark::State& state) {
  const auto f = worths(16);
  std::vector<std::size_t> part(16);
  for (std::size_t i = 0; i < 16; ++i) part[i] = i;
  const auto ev = RankingEvent::top_k(part, 3, 3);
  for (auto _ : state) benchmark::DoNotOptimize(event_probability_exact(f, ev));
}
BENCHMARK(BM_PodiumProbability);

}  // namespace

BENCHMARK_MAIN();
