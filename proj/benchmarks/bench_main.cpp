#include <benchmark/benchmark.h>

#include "lhs/dynamics.hpp"
#include "lhs/geometry.hpp"
#include "lhs/integrators.hpp"
#include "lhs/observables.hpp"
#include "lhs/sampling.hpp"
#include "lhs/transport.hpp"

using namespace lhs;

static void BM_RhsCentroid(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng = make_rng(1);
  const CMatrix z = random_states(n, 4, rng);
  const std::vector<SkewHermitian> f{random_skew(4, 0.5, rng)};
  CMatrix out(4, n);
  for (auto _ : state) {
    lhs_rhs_into(z, f, {1.0, 0.2}, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_RhsCentroid)->RangeMultiplier(4)->Range(64, 1 << 16)->Complexity(benchmark::oN);

static void BM_RhsPairwise(benchmark::State& state) {
  const Index n = state.range(0);
  Rng rng = make_rng(1);
  const auto ens = Ensemble::homogeneous(random_states(n, 4, rng), random_skew(4, 0.5, rng), {1.0, 0.2});
  for (auto _ : state) benchmark::DoNotOptimize(lhs_rhs_pairwise(ens));
  state.SetComplexityN(n);
}
BENCHMARK(BM_RhsPairwise)->RangeMultiplier(4)->Range(64, 1024)->Complexity(benchmark::oNSquared);

static void BM_Rk4Step(benchmark::State& state) {
  Rng rng = make_rng(2);
  auto ens = Ensemble::homogeneous(random_states(state.range(0), 4, rng), random_skew(4, 0.5, rng), {1.0, 0.2});
  for (auto _ : state) {
    ens = step_rk4(ens, 1e-3);
    benchmark::DoNotOptimize(ens.states().data());
  }
}
BENCHMARK(BM_Rk4Step)->Arg(64)->Arg(1024);

static void BM_PairFunctionals(benchmark::State& state) {
  Rng rng = make_rng(3);
  const CMatrix z = random_states(state.range(0), 4, rng);
  for (auto _ : state) benchmark::DoNotOptimize(pair_functionals(z));
}
BENCHMARK(BM_PairFunctionals)->Arg(64)->Arg(512);

static void BM_MatrixExp(benchmark::State& state) {
  Rng rng = make_rng(4);
  const SkewHermitian a = random_skew(state.range(0), 1.0, rng);
  for (auto _ : state) benchmark::DoNotOptimize(matrix_exp(a, 0.7));
}
BENCHMARK(BM_MatrixExp)->Arg(4)->Arg(16);

static void BM_Assignment(benchmark::State& state) {
  Rng rng = make_rng(5);
  const auto mu = EmpiricalMeasure::uniform(random_states(state.range(0), 4, rng));
  const auto nu = EmpiricalMeasure::uniform(random_states(state.range(0), 4, rng));
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_uniform(mu, nu, 2.0));
}
BENCHMARK(BM_Assignment)->Arg(16)->Arg(128)->Arg(256);

static void BM_TransportSimplex(benchmark::State& state) {
  Rng rng = make_rng(6);
  const auto mu = EmpiricalMeasure::uniform(random_states(state.range(0), 4, rng));
  const auto nu = EmpiricalMeasure::uniform(random_states(state.range(0) + 3, 4, rng));
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein_general(mu, nu, 2.0, false));
}
BENCHMARK(BM_TransportSimplex)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
