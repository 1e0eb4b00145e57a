#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "spreadspec/experiments.hpp"
#include "spreadspec/report_io.hpp"
#include "spreadspec/rng.hpp"

using namespace spreadspec;

namespace {

double success_rate(const SensingConfig &cfg, int trials, Seed base) {
  int ok = 0;
  for (int t = 0; t < trials; ++t) ok += run_trial(cfg, derive_seed(base, {std::uint64_t(t)})).recovered;
  return double(ok) / trials;
}

SensingConfig config(TransformKind sensing, TransformKind sparsity, ModulationKind mod,
                     std::size_t n, std::size_t s, std::size_t m) {
  SensingConfig c;
  c.sensing_kind = sensing;
  c.sparsity_kind = sparsity;
  c.modulation.kind = mod;
  c.n = n;
  c.s = s;
  c.m = m;
  return c;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("sparse signal generation") {
  SUBCASE("s = n fills every entry inside the unit disc") {
    const CVec a = generate_sparse_signal(16, 16, 3);
    for (const auto &v : a) {
      CHECK(std::abs(v) > 0.0);
      CHECK(std::abs(v) <= 1.0);
    }
  }
  SUBCASE("s = 1") {
    const CVec a = generate_sparse_signal(16, 1, 3);
    CHECK((a.array() != Complex(0.0)).count() == 1);
  }
  SUBCASE("reproducible") {
    CHECK(generate_sparse_signal(64, 5, 11) == generate_sparse_signal(64, 5, 11));
    CHECK(generate_sparse_signal(64, 5, 11) != generate_sparse_signal(64, 5, 12));
  }
  SUBCASE("support is uniform") {
    std::vector<int> hits(16, 0);
    const int draws = 10000;
    for (int d = 0; d < draws; ++d) {
      const CVec a = generate_sparse_signal(16, 8, derive_seed(77, {std::uint64_t(d)}));
      for (int k = 0; k < 16; ++k) hits[k] += a[k] != Complex(0.0);
    }
    const double expected = draws * 8.0 / 16.0;
    for (int k = 0; k < 16; ++k) CHECK(std::abs(hits[k] - expected) <= 0.05 * expected);
  }
  SUBCASE("s > n") { CHECK_THROWS_AS(generate_sparse_signal(4, 5, 1), std::invalid_argument); }
}

TEST_CASE("noise model") {
  CHECK(std::abs(noise_sigma(30.0, 1.0) - std::pow(10.0, -1.5)) < 1e-15);
  CHECK(std::abs(noise_sigma(30.0, 1.0) - 0.0316) < 1e-4);

  const CVec y = oracle::random_vector(64, 4);
  CHECK((add_noise(y, 300.0, 1.0, 2) - y).norm() < 1e-12 * y.norm());

  const CVec zero = CVec::Zero(100000);
  const CVec n = add_noise(zero, 10.0, 2.0, 9);
  const double sigma = noise_sigma(10.0, 2.0);
  const double var = n.squaredNorm() / double(n.size());
  CHECK(std::abs(var - sigma * sigma) <= 0.02 * sigma * sigma);
  CHECK(std::abs(n.mean()) < 5.0 * sigma / std::sqrt(double(n.size())));

  CVec x(4);
  x << 1.0, 2.0, 3.0, 4.0;
  CHECK(std::abs(sample_std(x) - std::sqrt(5.0 / 3.0)) < 1e-15);
}

TEST_CASE("best s-term approximation error") {
  const CVec a = generate_sparse_signal(10, 10, 1);
  CHECK(best_s_term_error(a, 10) == 0.0);
  CHECK(std::abs(best_s_term_error(a, 0) - a.cwiseAbs().sum()) < 1e-15);
  CVec b(3);
  b << 3.0, Complex(0.0, -2.0), 1.0;
  CHECK(std::abs(best_s_term_error(b, 2) - 1.0) < 1e-15);
  CVec tie(3);
  tie << 1.0, -1.0, 0.5;
  CHECK(std::abs(best_s_term_error(tie, 1) - 1.5) < 1e-15);
  CHECK_THROWS_AS(best_s_term_error(b, 4), std::invalid_argument);
}

TEST_CASE("config validation") {
  auto c = config(TransformKind::fourier, TransformKind::dirac, ModulationKind::none, 64, 4, 32);
  CHECK_NOTHROW(validate(c));
  c.m = 65;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.m = 32;
  c.s = 0;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.s = 4;
  c.modulation = {ModulationKind::chirp, 0.5};
  CHECK(measurement_space_size(c) == 96);
  c.m = 96;
  CHECK_NOTHROW(validate(c));
  c.sensing_kind = TransformKind::hadamard;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  auto h = config(TransformKind::hadamard, TransformKind::haar, ModulationKind::none, 48, 4, 8);
  CHECK_THROWS_AS(validate(h), std::invalid_argument);
}

TEST_CASE("build_system assembles the expected chains") {
  auto c = config(TransformKind::fourier, TransformKind::haar, ModulationKind::rademacher, 32, 2, 12);
  const auto sys = build_system(c, 5);
  CHECK(sys.a.in_dim() == 32);
  CHECK(sys.a.out_dim() == 12);
  // Dense oracle: Phi^H restricted, times diag(c), times Psi.
  const CMat phi = oracle::fourier_synthesis(32);
  const CMat psi = oracle::haar_synthesis(32);
  CMat rows(12, 32);
  for (int k = 0; k < 12; ++k) rows.row(k) = phi.adjoint().row(Eigen::Index(sys.omega.indices[k]));
  const CMat expected = rows * sys.modulation.values.asDiagonal() * psi;
  CHECK((to_dense(sys.a) - expected).cwiseAbs().maxCoeff() < 1e-12);

  c.modulation = {ModulationKind::chirp, 0.25};
  const auto analog = build_system(c, 5);
  CHECK(analog.modulation.n_upsampled == 40);
  for (auto i : analog.omega.indices) CHECK(i < 40);
}

TEST_CASE("single trials") {
  SUBCASE("full sampling recovers") {
    auto c = config(TransformKind::fourier, TransformKind::dirac, ModulationKind::none, 64, 1, 64);
    c.index_law = IndexLaw::uniform_without_replacement;
    const auto r = run_trial(c, 3);
    CHECK(r.recovered);
    CHECK(r.rel_error < 1e-6);
  }
  SUBCASE("coherent pair fails without modulation") {
    const auto c =
        config(TransformKind::fourier, TransformKind::fourier, ModulationKind::none, 64, 4, 16);
    CHECK(success_rate(c, 100, 1) < 0.1);
  }
  SUBCASE("coherent pair succeeds with modulation") {
    const auto c = config(TransformKind::fourier, TransformKind::fourier,
                          ModulationKind::rademacher, 64, 4, 32);
    CHECK(success_rate(c, 100, 2) > 0.9);
  }
  SUBCASE("trials are reproducible") {
    const auto c = config(TransformKind::fourier, TransformKind::haar, ModulationKind::steinhaus,
                          64, 4, 20);
    const auto a = reconstruct(c, 42), b = reconstruct(c, 42);
    CHECK(a.solver.alpha_star == b.solver.alpha_star);
    CHECK(a.trial.rel_error == b.trial.rel_error);
  }
}

TEST_CASE("noisy trials pass the realized noise norm as eta") {
  auto c = config(TransformKind::fourier, TransformKind::dirac, ModulationKind::rademacher, 64, 4, 32);
  std::vector<double> err20, err40;
  for (Seed t = 0; t < 15; ++t) {
    c.snr_db = 20.0;
    const auto r20 = reconstruct(c, t);
    CHECK(r20.trial.eta > 0.0);
    CHECK(r20.solver.residual_norm <= r20.trial.eta + 1e-6);
    err20.push_back(r20.trial.rel_error);
    c.snr_db = 40.0;
    err40.push_back(run_trial(c, t).rel_error);
  }
  CHECK(median(err20) >= median(err40));
}

TEST_CASE("phase transition cells") {
  PhaseTransitionParams p;
  p.n = 128;
  p.trials = 50;
  p.seed = 3;

  SUBCASE("incoherent modulated regime") {
    p.sensing_kind = TransformKind::fourier;
    p.sparsity_kind = TransformKind::dirac;
    p.modulation_kind = ModulationKind::rademacher;
    p.s_grid = {4};
    p.m_rule.explicit_m = {40};
    const auto r = phase_transition(p);
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells[0].probability >= 0.9);
    CHECK(r.cells[0].trials == 50);
  }
  SUBCASE("coherent pair without modulation") {
    p.sparsity_kind = TransformKind::fourier;
    p.modulation_kind = ModulationKind::none;
    p.s_grid = {4};
    p.m_rule.explicit_m = {40};
    CHECK(phase_transition(p).cells[0].probability <= 0.1);
  }
  SUBCASE("full row set always recovers") {
    p.sparsity_kind = TransformKind::haar;
    p.modulation_kind = ModulationKind::none;
    p.index_law = IndexLaw::uniform_without_replacement;
    p.s_grid = {1, 16, 64};
    p.m_rule.explicit_m = {128};
    p.trials = 5;
    for (const auto &cell : phase_transition(p).cells) CHECK(cell.probability == 1.0);
  }
  SUBCASE("cells beyond the row count are skipped") {
    p.s_grid = {16};
    p.trials = 1;
    const auto r = phase_transition(p);
    CHECK(r.cells.size() == 8);
    CHECK(r.skipped.size() == 2);
    CHECK(r.skipped[0].m == 144);
    for (const auto &c : r.cells) {
      CHECK(c.base_seed == cell_seed(3, c.s, c.m, 0.0));
      CHECK(c.probability == double(c.successes) / double(c.trials));
    }
  }
}

TEST_CASE("recovery curves at N = 1024") {
  RecoveryCurveParams p;
  p.n = 1024;
  p.s = 10;
  p.trials = 20;
  p.seed = 5;

  SUBCASE("dirac sparsity, no chirp, m = 100") {
    p.sparsity_kind = TransformKind::dirac;
    p.w_bar_list = {0.0};
    p.m_grid = {100};
    CHECK(recovery_curve(p).cells[0].probability >= 0.9);
  }
  SUBCASE("fourier sparsity, no chirp, m = 200") {
    p.sparsity_kind = TransformKind::fourier;
    p.w_bar_list = {0.0};
    p.m_grid = {200};
    CHECK(recovery_curve(p).cells[0].probability <= 0.1);
  }
  SUBCASE("fourier sparsity, w = 0.5, m = 150") {
    p.sparsity_kind = TransformKind::fourier;
    p.w_bar_list = {0.5};
    p.m_grid = {150};
    CHECK(recovery_curve(p).cells[0].probability >= 0.9);
  }
}

TEST_CASE("grids") {
  const auto g = geometric_grid(10, 256, 20);
  CHECK(g.front() == 10);
  CHECK(g.back() == 256);
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK(std::adjacent_find(g.begin(), g.end()) == g.end());
  CHECK(g.size() <= 20);
  CHECK(g.size() >= 18);
  MRule rule;
  CHECK(rule.values_for(3) == std::vector<std::size_t>{3, 6, 9, 12, 15, 18, 21, 24, 27, 30});
  rule.explicit_m = {5, 7};
  CHECK(rule.values_for(3) == std::vector<std::size_t>{5, 7});
}

TEST_CASE("report serialization") {
  PhaseTransitionParams p;
  p.n = 32;
  p.s_grid = {2};
  p.m_rule.explicit_m = {8, 16};
  p.trials = 3;
  const auto r = phase_transition(p);
  const auto csv = to_csv(r);
  CHECK(csv.rfind("s,m,w_bar,trials,successes,probability\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  const auto j = to_json(r);
  std::vector<std::string> keys;
  for (const auto &[k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"experiment", "config", "config_digest", "axes", "cells",
                                         "skipped"});
  CHECK(j["cells"][0]["base_seed"].get<Seed>() == r.cells[0].base_seed);
  CHECK(to_json(r, true).contains("runtime_seconds"));
  CHECK(r.config_digest.size() == 16);
}
