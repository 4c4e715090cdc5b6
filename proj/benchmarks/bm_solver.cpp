#include <benchmark/benchmark.h>

#include "lvhba/bench.hpp"

using namespace lvhba;

namespace {

void BM_lv_hba_step_merely_convex(benchmark::State& state) {
  const Index n = state.range(0);
  auto inst = bench::build_merely_convex(n);
  IterateState s;
  s.x = inst.default_init_x;
  s.y = inst.default_init_y;
  s.z = Vec::Zero(2);
  s.theta = s.y;
  s.lambda = Vec::Zero(2);
  for (auto _ : state) {
    s = lv_hba_step(inst.problem, inst.set_C, s, inst.default_config);
    benchmark::DoNotOptimize(s.x.data());
  }
}
BENCHMARK(BM_lv_hba_step_merely_convex)->Arg(100)->Arg(1000);

void BM_saddle_oracle_merely_convex(benchmark::State& state) {
  auto inst = bench::build_merely_convex(10);
  const auto tc = inst.constants();
  const Vec x = Vec::Constant(10, 0.5);
  const Vec y = Vec::Constant(20, -0.5);
  const Vec z = Vec::Constant(2, 0.1);
  SaddleOptions opts;
  opts.tol = 1e-10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(saddle_oracle(inst.problem, x, y, z,
                                           inst.default_config.gamma,
                                           inst.default_config.r, tc, opts));
  }
}
BENCHMARK(BM_saddle_oracle_merely_convex);

}  // namespace
