#include <doctest.h>

#include "spreadspec/coherence.hpp"
#include "spreadspec/experiments.hpp"
#include "spreadspec/report_io.hpp"

using namespace spreadspec;

// The OpenMP kernels must reproduce their serial references exactly,
// whatever the thread count.

TEST_CASE("column scan matches the serial reference") {
  for (auto kind : {TransformKind::haar, TransformKind::fourier, TransformKind::dirac}) {
    const auto chain = compose(adjoint_of(make_transform(TransformKind::fourier, 256)),
                               make_transform(kind, 256));
    const auto ref = serial::gram_column_max(chain);
    for (int threads : {1, 3, 8}) {
      const auto par = gram_column_max(chain, threads);
      CHECK(par.value == ref.value);
      CHECK(par.row == ref.row);
      CHECK(par.col == ref.col);
    }
  }
}

TEST_CASE("modulus coherence matches the triple-loop reference") {
  for (auto sens : {TransformKind::fourier, TransformKind::haar})
    for (auto spars : {TransformKind::haar, TransformKind::dirac}) {
      const auto a = make_transform(sens, 64), b = make_transform(spars, 64);
      const double ref = serial::modulus_coherence(a, b);
      for (int threads : {1, 4}) CHECK(std::abs(modulus_coherence(a, b, threads) - ref) < 1e-14);
    }
}

TEST_CASE("lemma 1 Monte Carlo is schedule independent") {
  const auto f = make_transform(TransformKind::fourier, 32);
  const auto h = make_transform(TransformKind::haar, 32);
  const auto ref = serial::lemma1_monte_carlo(f, h, ModulationKind::steinhaus, 0.1, 40, 9);
  for (int threads : {1, 8}) {
    const auto par = lemma1_monte_carlo(f, h, ModulationKind::steinhaus, 0.1, 40, 9, threads);
    CHECK(par.violations == ref.violations);
    CHECK(par.max_observed == ref.max_observed);
  }
}

TEST_CASE("phase transition is identical serially and at any thread count") {
  PhaseTransitionParams p;
  p.n = 64;
  p.sparsity_kind = TransformKind::haar;
  p.s_grid = {2, 4};
  p.m_rule.multiples = {2, 4, 6};
  p.trials = 6;
  p.seed = 17;
  const auto ref = to_json(serial::phase_transition(p)).dump();
  for (int threads : {1, 2, 8}) {
    ExecutionOptions exec;
    exec.threads = threads;
    CHECK(to_json(phase_transition(p, exec)).dump() == ref);
  }
}

TEST_CASE("recovery curve is identical serially and at any thread count") {
  RecoveryCurveParams p;
  p.n = 64;
  p.s = 3;
  p.w_bar_list = {0.0, 0.5};
  p.m_grid = {12, 24};
  p.trials = 4;
  const auto ref = to_csv(serial::recovery_curve(p));
  for (int threads : {1, 8}) {
    ExecutionOptions exec;
    exec.threads = threads;
    CHECK(to_csv(recovery_curve(p, exec)) == ref);
  }
}
