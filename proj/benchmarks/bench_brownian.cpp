#include <benchmark/benchmark.h>

#include "sddelab/brownian.hpp"

namespace {

void BM_GenerateIncrements(benchmark::State& state) {
  const auto n = static_cast<std::int64_t>(state.range(0));
  std::uint64_t stream = 0;
  for (auto _ : state) {
    auto path = sddelab::generate_increments(42, stream++, 0.0, 2.0, n);
    benchmark::DoNotOptimize(path.increments().data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_GenerateIncrements)->Arg(1 << 10)->Arg(1 << 13)->Arg(1 << 16);

void BM_Coarsen(benchmark::State& state) {
  const auto n = static_cast<std::int64_t>(state.range(0));
  const auto path = sddelab::generate_increments(42, 0, 0.0, 2.0, n);
  for (auto _ : state) {
    auto coarse = sddelab::coarsen(path, 16);
    benchmark::DoNotOptimize(coarse.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Coarsen)->Arg(1 << 13)->Arg(1 << 16);

}  // namespace
