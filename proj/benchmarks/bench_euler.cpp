#include <benchmark/benchmark.h>

#include "sddelab/brownian.hpp"
#include "sddelab/euler.hpp"
#include "sddelab/experiment.hpp"

namespace {

void BM_IntegrateReferenceProblem(benchmark::State& state) {
  const auto n = static_cast<std::int64_t>(state.range(0));
  const auto problem =
      sddelab::build_test_problem(sddelab::config_from_preset("table1").problem.params());
  const auto path = sddelab::generate_increments(42, 0, 0.0, 2.0, 4 * n);
  const auto noise = sddelab::coarsen(path, 2);
  for (auto _ : state) {
    auto euler = sddelab::integrate(problem, noise, n);
    benchmark::DoNotOptimize(euler.terminal_scalar());
  }
  state.SetItemsProcessed(state.iterations() * 2 * n);
}
BENCHMARK(BM_IntegrateReferenceProblem)->Arg(1 << 6)->Arg(1 << 9)->Arg(1 << 11);

}  // namespace
