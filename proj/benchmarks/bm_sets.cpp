#include <benchmark/benchmark.h>

#include <random>

#include "lvhba/sets.hpp"

using namespace lvhba;

namespace {

Vec randv(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> d(0.0, 2.0);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

void BM_project_box(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(1);
  const ConvexSet s = box(Vec::Constant(n, -1.0), Vec::Constant(n, 1.0));
  const Vec w = randv(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(project(s, w));
}
BENCHMARK(BM_project_box)->Arg(64)->Arg(1024);

void BM_project_affine(benchmark::State& state) {
  const Index n = state.range(0);
  std::mt19937_64 rng(2);
  Mat M(n / 4, n);
  for (Index i = 0; i < M.rows(); ++i) M.row(i) = randv(rng, n).transpose();
  const ConvexSet s = affine_subspace(M, Vec::Zero(n / 4));
  const Vec w = randv(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(project(s, w));
}
BENCHMARK(BM_project_affine)->Arg(64)->Arg(256);

void BM_project_dykstra(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<ConvexSet> members;
  const Vec anchor = randv(rng, 5);
  for (int i = 0; i < 6; ++i) {
    const Vec a = randv(rng, 5);
    members.push_back(halfspace(a, a.dot(anchor) + 0.5));
  }
  const ConvexSet s = intersection(members, 5000, 1e-10);
  const Vec w = randv(rng, 5);
  for (auto _ : state) benchmark::DoNotOptimize(project(s, w));
}
BENCHMARK(BM_project_dykstra);

}  // namespace
