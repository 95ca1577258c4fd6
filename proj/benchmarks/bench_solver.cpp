#include <qotlab/coupling.hpp>
#include <qotlab/dual.hpp>
#include <qotlab/fixtures.hpp>
#include <qotlab/measures.hpp>
#include <qotlab/oracle.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace qot;

void BM_SolveDualLine(benchmark::State& state) {
  QuadraticConvexOptions opts;
  opts.eps = 0.1;
  const auto fx = quadratic_convex_instance(static_cast<int>(state.range(0)), 1, 1, opts);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dual(fx.instance));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveDualLine)->RangeMultiplier(2)->Range(16, 512)->Complexity();

void BM_SolveDualPlane(benchmark::State& state) {
  QuadraticConvexOptions opts;
  opts.eps = 0.2;
  const auto fx = quadratic_convex_instance(static_cast<int>(state.range(0)), 2, 1, opts);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dual(fx.instance));
  }
}
BENCHMARK(BM_SolveDualPlane)->Arg(4)->Arg(8)->Arg(16);

void BM_Example62(benchmark::State& state) {
  const auto ex = example62(0.1, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_dual(ex.instance));
  }
}
BENCHMARK(BM_Example62)->Arg(201)->Arg(801)->Arg(3201);

void BM_Wasserstein1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = quadratic_convex_instance(n, 2, 1).instance.p;
  const auto b = quadratic_convex_instance(n, 2, 2, {1.0, 1.3}).instance.p;
  for (auto _ : state) {
    benchmark::DoNotOptimize(wasserstein1(a, b));
  }
}
BENCHMARK(BM_Wasserstein1)->Arg(3)->Arg(5)->Arg(8);

void BM_Oracle(benchmark::State& state) {
  QuadraticConvexOptions opts;
  opts.eps = 0.3;
  const auto fx = quadratic_convex_instance(static_cast<int>(state.range(0)), 1, 3, opts);
  const Instance& inst = fx.instance;
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::qp_primal_solve(inst.p, inst.q, inst.cost, inst.eps));
  }
}
BENCHMARK(BM_Oracle)->Arg(4)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
