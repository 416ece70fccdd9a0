#include <benchmark/benchmark.h>

#include <vector>

#include "mlp/benchmarks.hpp"
#include "mlp/bounds.hpp"
#include "mlp/engine.hpp"
#include "mlp/sampler.hpp"

namespace {

void BM_Evaluate(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const mlp::BenchmarkCase bench = mlp::make_case("grad-dependent-sine", {d});
  const std::vector<double> x(d, 0.1);
  mlp::MlpConfig config;
  config.depth = n;
  config.base = static_cast<std::uint64_t>(n);
  std::int64_t k = 0;
  for (auto _ : state) {
    auto est = mlp::evaluate(bench.problem, config, {++k}, 0.0, x);
    benchmark::DoNotOptimize(est.value);
  }
  const auto draws = static_cast<double>(mlp::cost_rv(d, n, config.base));
  state.counters["draws/s"] = benchmark::Counter(
      draws * static_cast<double>(state.iterations()), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Evaluate)->Args({1, 2})->Args({1, 4})->Args({10, 3})->Args({10, 4});

void BM_DeriveStream(benchmark::State& state) {
  const mlp::PathDigest root = mlp::PathDigest::root(1);
  std::int64_t k = 0;
  for (auto _ : state) {
    mlp::RandomStream s(root.child(3, ++k));
    benchmark::DoNotOptimize(s.next_u64());
  }
}
BENCHMARK(BM_DeriveStream);

void BM_Gaussian(benchmark::State& state) {
  mlp::RandomStream s(mlp::PathDigest::root(2));
  mlp::DrawLedger ledger;
  std::vector<double> z(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    mlp::sample_gaussian(s, z, ledger);
    benchmark::DoNotOptimize(z.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Gaussian)->Arg(1)->Arg(100);

void BM_CostRecursion(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(mlp::cost_rv(10, 20, 5));
  }
}
BENCHMARK(BM_CostRecursion);

}  // namespace

BENCHMARK_MAIN();
