#include <benchmark/benchmark.h>

#include <random>

#include "mineig/fixtures.hpp"
#include "mineig/local_search.hpp"
#include "mineig/relaxation.hpp"
#include "mineig/rounding.hpp"
#include "mineig/spectral.hpp"

using namespace mineig;

namespace {

std::vector<Vector> gaussian(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  std::vector<Vector> out(n, Vector(d));
  for (auto& v : out)
    for (double& x : v) x = g(gen);
  return out;
}

SymMatrix random_pd(std::size_t d) {
  SymMatrix a(d);
  for (const auto& v : gaussian(2 * d, d, 7)) a.add_outer(v);
  return a;
}

void BM_EigenDecompose(benchmark::State& state) {
  const SymMatrix a = random_pd(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eigen_decompose(a));
}
BENCHMARK(BM_EigenDecompose)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_SwapGain(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const SymMatrix a = random_pd(d);
  const auto vs = gaussian(2, d, 11);
  for (auto _ : state) benchmark::DoNotOptimize(swap_gain(a, vs[0], vs[1]));
}
BENCHMARK(BM_SwapGain)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

void BM_SolveCp(benchmark::State& state) {
  const Instance inst = planted_instance(3, MatroidKind::kUniform, 5);
  const auto seed = make_seed(inst.vectors, {}, 0.0);
  const auto face = face_matroid(inst, seed);
  for (auto _ : state) benchmark::DoNotOptimize(solve_cp(inst, face, Objective::det_root()));
}
BENCHMARK(BM_SolveCp)->Unit(benchmark::kMillisecond);

void BM_PipageWalk(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const UniformMatroid m(n, n / 2);
  const Vector x(n, 0.5);
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(pipage_walk(m, x, rng));
}
BENCHMARK(BM_PipageWalk)->Arg(10)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
