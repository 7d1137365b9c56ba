#include <benchmark/benchmark.h>

#include "robenv/classifiers.hpp"
#include "robenv/exactmath.hpp"
#include "robenv/hamming.hpp"
#include "robenv/perturb.hpp"
#include "robenv/pmf.hpp"
#include "robenv/random.hpp"
#include "robenv/robustness.hpp"

using namespace robenv;

static HammingSubset random_half(const GraphParams& g, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  HammingSubset s(g);
  for (std::uint64_t v = 0; v < g.vertex_count(); ++v) {
    if (rng.below(2)) s.insert(v);
  }
  return s;
}

static void BM_Expand(benchmark::State& state) {
  const GraphParams g{static_cast<int>(state.range(0)), 2};
  const HammingSubset s = random_half(g, 1);
  for (auto _ : state) benchmark::DoNotOptimize(expand(s));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.vertex_count()));
}
BENCHMARK(BM_Expand)->Arg(10)->Arg(16)->Arg(20);

static void BM_ExpandByNeighbors(benchmark::State& state) {
  const GraphParams g{static_cast<int>(state.range(0)), 2};
  const HammingSubset s = random_half(g, 1);
  for (auto _ : state) benchmark::DoNotOptimize(expand_by_neighbors(s));
}
BENCHMARK(BM_ExpandByNeighbors)->Arg(10)->Arg(16);

static void BM_DistanceToSet(benchmark::State& state) {
  const GraphParams g{16, 2};
  HammingSubset s(g);
  s.insert(0);
  for (auto _ : state) benchmark::DoNotOptimize(distance_to_set(s));
}
BENCHMARK(BM_DistanceToSet);

static void BM_IidSum(benchmark::State& state) {
  const DiscretePMF base = pmf_uniform_levels(256);
  for (auto _ : state) benchmark::DoNotOptimize(pmf_iid_sum(base, state.range(0)));
}
BENCHMARK(BM_IidSum)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_BinomialTails(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(BinomialTails(state.range(0), make_rational(3, 10)));
}
BENCHMARK(BM_BinomialTails)->Arg(64)->Arg(1024)->Arg(10000);

static void BM_ModeBound(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mode_bound_holds(state.range(0)));
}
BENCHMARK(BM_ModeBound)->Arg(1000)->Arg(10000);

static void BM_FindPerturbation(benchmark::State& state) {
  const SpaceParams p{2, 1, static_cast<int>(state.range(0))};
  const ClassifierHandle c = sum_classifier(p);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const ImageTensor img = sample_uniform(p, 3, seed);
    benchmark::DoNotOptimize(find_perturbation(c, img, 0.25, seed++));
  }
}
BENCHMARK(BM_FindPerturbation)->Arg(2)->Arg(4)->Arg(6);

static void BM_Theorem1Balanced(benchmark::State& state) {
  const SpaceParams p{2, 1, 2};
  const std::vector<double> grid{0.5, 0.75, 1.0};
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const ClassifierHandle c = random_classifier(p, 2, RandomKind::Balanced, seed++);
    benchmark::DoNotOptimize(theorem1_holds(c, grid));
  }
}
BENCHMARK(BM_Theorem1Balanced);

BENCHMARK_MAIN();
