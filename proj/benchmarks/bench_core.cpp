#include <benchmark/benchmark.h>

#include "evoset/csrw.hpp"
#include "evoset/env_io.hpp"
#include "evoset/evolving_set.hpp"
#include "evoset/exact_chain.hpp"
#include "evoset/fuzz.hpp"
#include "evoset/isoperimetry.hpp"
#include "evoset/percolation.hpp"

using namespace evoset;

namespace {

DynEnv box(int dim, int side, Time horizon) {
  BoxSpec spec;
  spec.dim = dim;
  spec.side = side;
  spec.weight_max = 2.0;
  spec.changes = 4 * side;
  spec.change_horizon = horizon;
  spec.horizon = horizon;
  return zd_box(spec);
}

void BM_MultiStepKernel(benchmark::State& state) {
  const DynEnv env = box(2, static_cast<int>(state.range(0)), 20);
  for (auto _ : state) benchmark::DoNotOptimize(multi_step_kernel<double>(env, 0, 20));
  state.SetLabel(std::to_string(env.num_vertices()) + " vertices, 20 steps");
}
BENCHMARK(BM_MultiStepKernel)->Arg(6)->Arg(10)->Arg(16);

void BM_SuccessorLaw(benchmark::State& state) {
  const DynEnv env = box(2, 20, 2);
  VertexSet set;
  for (Vertex v = 0; v < static_cast<Vertex>(state.range(0)); ++v) set.push_back(v);
  const auto s = make_state<double>(env, 0, set);
  for (auto _ : state) benchmark::DoNotOptimize(successor_law(env, s));
}
BENCHMARK(BM_SuccessorLaw)->Arg(10)->Arg(100)->Arg(400);

void BM_ExactSetDistribution(benchmark::State& state) {
  Rng rng = make_rng(1, 0, 0);
  const DynEnv env = random_env_fuzzer(static_cast<std::size_t>(state.range(0)), 4, rng);
  for (auto _ : state) benchmark::DoNotOptimize(exact_set_distribution<double>(env, 0, 4));
}
BENCHMARK(BM_ExactSetDistribution)->Arg(4)->Arg(8);

void BM_KappaEnumeration(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const DynEnv env = box(2, side, 1);
  IsoConfig cfg;
  cfg.mode = IsoMode::kExact;
  for (auto _ : state) benchmark::DoNotOptimize(kappa_detail(env, 0, cfg));
  state.SetLabel(std::to_string(side * side) + " vertices");
}
BENCHMARK(BM_KappaEnumeration)->Arg(3)->Arg(4);

void BM_CsrwPath(benchmark::State& state) {
  const DynEnv env = box(2, 10, 60);
  Rng rng = make_rng(2, 0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_csrw(env, 0, 50.0, rng));
}
BENCHMARK(BM_CsrwPath);

void BM_PercolationCluster(benchmark::State& state) {
  PercConfig cfg;
  cfg.d = 3;
  cfg.L = static_cast<int>(state.range(0));
  cfg.p = 0.4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_cluster(cfg));
    ++cfg.seed;
  }
}
BENCHMARK(BM_PercolationCluster)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
