#include <benchmark/benchmark.h>

#include "sddelab/brownian.hpp"
#include "sddelab/euler.hpp"
#include "sddelab/experiment.hpp"
#include "sddelab/oracle.hpp"

namespace {

void BM_ExactSolution(benchmark::State& state) {
  const auto n = static_cast<std::int64_t>(state.range(0));
  const auto params = sddelab::config_from_preset("table1").problem.params();
  const auto path = sddelab::generate_increments(42, 0, 0.0, 2.0, n);
  for (auto _ : state) {
    auto solution = sddelab::exact_solution(params, path);
    benchmark::DoNotOptimize(solution.terminal());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ExactSolution)->Arg(1 << 11)->Arg(1 << 14)->Arg(1 << 16);

// One full coupled stream of the reference study: fine path, oracle, and
// Euler runs at levels 2^6..2^11 via coarsening.
void BM_ExperimentStream(benchmark::State& state) {
  const auto params = sddelab::config_from_preset("table1").problem.params();
  const auto problem = sddelab::build_test_problem(params);
  std::uint64_t stream = 0;
  for (auto _ : state) {
    const auto path = sddelab::generate_increments(42, stream++, 0.0, 2.0, 2 << 15);
    const auto solution = sddelab::exact_solution(params, path);
    double acc = solution.terminal();
    for (int level = 6; level <= 11; ++level) {
      const std::int64_t n = std::int64_t{1} << level;
      acc += sddelab::integrate(problem, sddelab::coarsen(path, (std::int64_t{1} << 15) / n), n)
                 .terminal_scalar();
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_ExperimentStream);

}  // namespace
