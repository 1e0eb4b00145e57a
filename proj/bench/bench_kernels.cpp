// Serial reference kernels against their OpenMP counterparts.
// Range argument 0 means the serial version; otherwise it is the thread count.

#include <benchmark/benchmark.h>

#include "spreadspec/coherence.hpp"
#include "spreadspec/experiments.hpp"

using namespace spreadspec;

namespace {

void BM_GramColumnMax(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  const auto chain = compose(adjoint_of(make_transform(TransformKind::fourier, n)),
                             make_transform(TransformKind::haar, n));
  for (auto _ : state) {
    auto r = threads == 0 ? serial::gram_column_max(chain) : gram_column_max(chain, threads);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_GramColumnMax)->ArgsProduct({{256, 1024}, {0, 1, 2, 4}})->Unit(benchmark::kMillisecond);

void BM_ModulusCoherence(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  const auto a = make_transform(TransformKind::fourier, n);
  const auto b = make_transform(TransformKind::haar, n);
  for (auto _ : state) {
    double r = threads == 0 ? serial::modulus_coherence(a, b) : modulus_coherence(a, b, threads);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ModulusCoherence)->ArgsProduct({{128, 256}, {0, 1, 2, 4}})->Unit(benchmark::kMillisecond);

void BM_Lemma1(benchmark::State &state) {
  const int threads = static_cast<int>(state.range(0));
  const auto f = make_transform(TransformKind::fourier, 64);
  const auto h = make_transform(TransformKind::haar, 64);
  for (auto _ : state) {
    auto r = threads == 0
                 ? serial::lemma1_monte_carlo(f, h, ModulationKind::rademacher, 0.05, 100, 1)
                 : lemma1_monte_carlo(f, h, ModulationKind::rademacher, 0.05, 100, 1, threads);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Lemma1)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_PhaseTransition(benchmark::State &state) {
  const int threads = static_cast<int>(state.range(0));
  PhaseTransitionParams p;
  p.n = 64;
  p.sparsity_kind = TransformKind::haar;
  p.s_grid = {4};
  p.m_rule.multiples = {2, 4, 6};
  p.trials = 10;
  ExecutionOptions exec;
  exec.threads = threads;
  for (auto _ : state) {
    auto r = threads == 0 ? serial::phase_transition(p) : phase_transition(p, exec);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_PhaseTransition)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
