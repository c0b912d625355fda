#include <benchmark/benchmark.h>

#include "lexrsm/lp.hpp"

using namespace lexrsm;

static void BM_lp_box(benchmark::State& state) {
  LPProblem p;
  p.objective = LinExpr::var("x") + LinExpr::var("y");
  p.constraints.cs = {
      {LinExpr::var("x") - LinExpr(Rational(1)), false},
      {LinExpr::var("y") - LinExpr(Rational(1)), false},
      {-LinExpr::var("x"), false},
      {-LinExpr::var("y"), false}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(lp_solve(p));
  }
}
BENCHMARK(BM_lp_box);

BENCHMARK_MAIN();
