#include <benchmark/benchmark.h>

#include <random>

#include "filterlab/constructions.hpp"
#include "filterlab/convergence.hpp"
#include "filterlab/filters.hpp"

using namespace filterlab;

static void BM_CountingColumns(benchmark::State& state) {
  const SetExpr J = SetExpr::columns(SetExpr::progression(1, 3), ColumnRule::subsample(2, 3));
  const auto h = static_cast<Nat>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(counting(J, h));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CountingColumns)->RangeMultiplier(10)->Range(1000, 1000000)->Complexity();

static void BM_CountingSelector(benchmark::State& state) {
  const SetExpr sel = SetExpr::selector(Blocking::dyadic(), SelectRule::Min);
  const auto h = static_cast<Nat>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(counting(sel, h));
}
BENCHMARK(BM_CountingSelector)->Arg(1 << 16)->Arg(1 << 20);

static void BM_WalshAbsSum(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<long long> a(static_cast<std::size_t>(state.range(0)));
  for (auto& x : a)
    x = static_cast<long long>(rng() % 201) - 100;
  for (auto _ : state)
    benchmark::DoNotOptimize(walsh_abs_sum(a));
}
BENCHMARK(BM_WalshAbsSum)->DenseRange(4, 16, 4);

static void BM_ScalarLimit(benchmark::State& state) {
  ConvergenceQuery q;
  q.filter = FilterHandle::statistical();
  q.seq = mixture(3);
  q.mode = Mode::Scalar;
  q.scalar_limit = 0;
  q.eps = rational(1, 100);
  q.horizon = static_cast<Nat>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(f_limit(q));
}
BENCHMARK(BM_ScalarLimit)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_BlockRespecting(benchmark::State& state) {
  const auto h = static_cast<Nat>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(block_respecting_check(FilterHandle::statistical(), SetExpr::all(), Blocking::dyadic(), h));
}
BENCHMARK(BM_BlockRespecting)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

static void BM_StrongCesaro(benchmark::State& state) {
  const SeqGen alt = alternating();
  for (auto _ : state)
    benchmark::DoNotOptimize(strong_cesaro(alt, rational(1, 3), static_cast<Nat>(state.range(0))));
}
BENCHMARK(BM_StrongCesaro)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
