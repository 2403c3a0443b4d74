#include <benchmark/benchmark.h>

#include "breakcoag/hypotheses.hpp"
#include "breakcoag/solver.hpp"

using namespace breakcoag;

namespace {

OperatorTables linear_tables(std::size_t cells) {
  return build_tables(make_grid(1e-4, 1e3, cells), make_kernel(kernel::SumProduct{0.0, 1.0}),
                      {daughter::PowerTotal{0.0}}, {prob::Constant{0.5}}, {});
}

void BM_ApplyRhs(benchmark::State& st) {
  const auto tables = linear_tables(static_cast<std::size_t>(st.range(0)));
  const State s = sample_initial({ic::Exponential{1.0}, 1.0}, tables.grid_ptr());
  for (auto _ : st) benchmark::DoNotOptimize(apply_rhs(tables, s));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_ApplyRhs)->RangeMultiplier(2)->Range(50, 400)->Complexity(benchmark::oNSquared);

void BM_ApplyRhsPowerEach(benchmark::State& st) {
  const auto tables = build_tables(make_grid(1e-4, 1e3, static_cast<std::size_t>(st.range(0))),
                                   make_kernel(kernel::Constant{1.0}), {daughter::PowerEach{0.0}},
                                   {prob::Constant{0.5}}, {});
  const State s = sample_initial({ic::Exponential{1.0}, 1.0}, tables.grid_ptr());
  for (auto _ : st) benchmark::DoNotOptimize(apply_rhs(tables, s));
}
BENCHMARK(BM_ApplyRhsPowerEach)->Arg(100)->Arg(300);

void BM_BuildTables(benchmark::State& st) {
  const auto grid = make_grid(1e-4, 1e3, static_cast<std::size_t>(st.range(0)));
  const auto k = make_kernel(kernel::SumProduct{0.0, 1.0});
  for (auto _ : st) {
    benchmark::DoNotOptimize(build_tables(grid, k, {daughter::PowerTotal{-0.5}}, {prob::Constant{0.5}}, {}));
  }
}
BENCHMARK(BM_BuildTables)->Arg(100)->Arg(300);

void BM_ClassifyGrowth(benchmark::State& st) {
  const auto k = make_kernel(kernel::SumProduct{-0.25, 0.5});
  for (auto _ : st) benchmark::DoNotOptimize(classify_growth(k, {}, static_cast<std::size_t>(st.range(0))));
}
BENCHMARK(BM_ClassifyGrowth)->Arg(10000)->Arg(40000);

}  // namespace
BENCHMARK_MAIN();
