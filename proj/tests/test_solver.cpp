#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spreadspec/experiments.hpp"
#include "spreadspec/solver.hpp"

using namespace spreadspec;

namespace {

// Modulated Fourier chain with rows drawn i.i.d. (duplicates allowed).
LinearOperator modulated_fourier(std::size_t n, std::size_t m, Seed seed,
                                 IndexLaw law = IndexLaw::iid_uniform) {
  const auto c = make_random_modulation(ModulationKind::rademacher, n, seed);
  const auto rows = sample_indices(law, m, n, seed + 1);
  return compose(restrict_rows(adjoint_of(make_transform(TransformKind::fourier, n)), rows),
                 modulation_operator(c));
}

}  // namespace

TEST_CASE("complex soft threshold") {
  CHECK(std::abs(complex_soft_threshold({3.0, 4.0}, 1.0) - Complex(2.4, 3.2)) < 1e-15);
  CHECK(complex_soft_threshold({-0.3, 7.0}, 0.0) == Complex(-0.3, 7.0));
  CHECK(complex_soft_threshold({0.5, 0.0}, 1.0) == Complex(0.0, 0.0));
  CHECK(complex_soft_threshold({0.6, 0.8}, 1.0) == Complex(0.0, 0.0));
  CHECK_THROWS_AS(complex_soft_threshold(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("full identity system returns the data") {
  const auto a = restrict_rows(make_identity(6), IndexSet{{0, 1, 2, 3, 4, 5}});
  const CVec y = oracle::random_vector(6, 3);
  const auto r = solve_bp(a, y);
  CHECK((r.alpha_star - y).norm() < 1e-10);
  CHECK(r.converged);
}

TEST_CASE("fully sampled fourier recovers a 1-sparse vector") {
  const auto rows = sample_indices(IndexLaw::uniform_without_replacement, 16, 16, 4);
  const auto a = restrict_rows(adjoint_of(make_transform(TransformKind::fourier, 16)), rows);
  CVec alpha = CVec::Zero(16);
  alpha[5] = Complex(0.3, -0.7);
  const auto r = solve_bp(a, a.forward(alpha));
  CHECK((r.alpha_star - alpha).norm() < 1e-6);
}

TEST_CASE("basis pursuit agrees with the exhaustive support oracle") {
  const auto a = modulated_fourier(16, 10, 21);
  const CVec alpha = generate_sparse_signal(16, 2, 8);
  const CVec y = a.forward(alpha);
  const auto expected = oracle::exhaustive_bp(to_dense(a), y, 4);
  REQUIRE(expected.has_value());
  const auto r = solve_bp(a, y);
  CHECK(r.converged);
  CHECK((r.alpha_star - expected->alpha).norm() <= 1e-4 * expected->alpha.norm());
}

TEST_CASE("oracle equivalence on random small instances") {
  int compared = 0;
  for (unsigned t = 0; t < 20; ++t) {
    const std::size_t s = 1 + t % 3;
    const std::size_t m = 8 + t % 7;
    const auto a = modulated_fourier(16, m, 100 + t);
    const CVec alpha = generate_sparse_signal(16, s, 200 + t);
    const CVec y = a.forward(alpha);
    const auto expected = oracle::exhaustive_bp(to_dense(a), y, 4);
    if (!expected) continue;
    ++compared;
    const auto r = solve_bp(a, y);
    CAPTURE(t);
    CHECK((r.alpha_star - expected->alpha).norm() <= 1e-4 * expected->alpha.norm());
  }
  CHECK(compared >= 10);
}

TEST_CASE("solver invariants") {
  const auto a = modulated_fourier(32, 14, 7);
  const CVec alpha = generate_sparse_signal(32, 3, 9);
  const CVec y = a.forward(alpha);
  const SolverOptions opts;
  const auto r = solve_bp(a, y, opts);
  REQUIRE(r.converged);

  SUBCASE("feasible at convergence") { CHECK(r.residual_norm <= opts.feasibility_tol); }
  SUBCASE("objective no larger than the truth's") {
    CHECK(r.objective <= alpha.cwiseAbs().sum() * (1.0 + 1e-4));
    CHECK(r.objective >= 0.0);
  }
  SUBCASE("deterministic") {
    const auto again = solve_bp(a, y, opts);
    CHECK(again.alpha_star == r.alpha_star);
    CHECK(again.iterations == r.iterations);
  }
  SUBCASE("scaling equivariance") {
    for (double c : {0.01, 3.0, 250.0}) {
      const auto scaled = solve_bpdn(a, c * y, 0.0, opts);
      CHECK((scaled.alpha_star - c * r.alpha_star).norm() <= 1e-8 * c * r.alpha_star.norm());
    }
    const CVec noisy = y + 0.01 * oracle::random_vector(14, 2);
    const auto base = solve_bpdn(a, noisy, 0.05, opts);
    const auto scaled = solve_bpdn(a, 4.0 * noisy, 0.2, opts);
    CHECK((scaled.alpha_star - 4.0 * base.alpha_star).norm() <= 1e-8 * 4.0 * base.alpha_star.norm());
  }
}

TEST_CASE("denoising does not hurt") {
  for (Seed seed : {1, 2, 3, 4, 5}) {
    CAPTURE(seed);
    const auto a = modulated_fourier(16, 12, 40 + seed);
    const CVec alpha = generate_sparse_signal(16, 2, 50 + seed);
    const CVec clean = a.forward(alpha);
    const CVec noisy = add_noise(clean, 20.0, 0.25, 60 + seed);
    const double eta = (noisy - clean).norm();
    const auto bpdn = solve_bpdn(a, noisy, eta);
    const auto bp = solve_bpdn(a, noisy, 0.0);
    CHECK(bpdn.residual_norm <= eta + 1e-6);
    CHECK((bpdn.alpha_star - alpha).norm() <= (bp.alpha_star - alpha).norm());
  }
}

TEST_CASE("constraint projection strategies agree") {
  const auto a = modulated_fourier(16, 12, 3);  // duplicates likely
  const auto unique = modulated_fourier(16, 12, 3, IndexLaw::uniform_without_replacement);
  const CVec alpha = oracle::random_vector(16, 12);
  SolverOptions dense_opts;
  SolverOptions cg_opts;
  cg_opts.dense_gram_limit = 0;
  cg_opts.cg_max_iterations = 500;

  for (double eta : {0.0, 0.05, 0.4}) {
    CAPTURE(eta);
    {
      const CVec y = a.forward(generate_sparse_signal(16, 3, 5));
      const ConstraintProjector dense(a, y, eta, dense_opts);
      const ConstraintProjector iterative(a, y, eta, cg_opts);
      CHECK(dense.strategy() == ConstraintProjector::Strategy::dense_gram);
      CHECK(iterative.strategy() == ConstraintProjector::Strategy::iterative);
      const CVec pd = dense.project(alpha);
      const CVec pi = iterative.project(alpha);
      CHECK((pd - pi).norm() < 1e-6);
      CHECK((y - a.forward(pd)).norm() <= eta + 1e-9);
      CHECK((dense.project(pd) - pd).norm() < 1e-9);
    }
    {
      const CVec y = unique.forward(generate_sparse_signal(16, 3, 5));
      const ConstraintProjector closed(unique, y, eta, dense_opts);
      const auto plain = make_dense(to_dense(unique));
      const ConstraintProjector dense(plain, y, eta, dense_opts);
      CHECK(closed.strategy() == ConstraintProjector::Strategy::orthonormal_rows);
      CHECK(dense.strategy() == ConstraintProjector::Strategy::dense_gram);
      CHECK((closed.project(alpha) - dense.project(alpha)).norm() < 1e-9);
    }
  }
}

TEST_CASE("projection is the nearest feasible point") {
  // Against brute force: random feasible points are never closer.
  const auto a = modulated_fourier(8, 5, 11);
  const CVec y = a.forward(oracle::random_vector(8, 2));
  const double eta = 0.3;
  const ConstraintProjector proj(a, y, eta, {});
  const CVec alpha = oracle::random_vector(8, 99) * 3.0;
  const CVec p = proj.project(alpha);
  const double d = (alpha - p).norm();
  for (unsigned k = 0; k < 200; ++k) {
    const CVec q = proj.project(p + 0.2 * oracle::random_vector(8, 500 + k));
    CHECK((alpha - q).norm() >= d - 1e-9);
  }
}

TEST_CASE("iterative strategy solves basis pursuit") {
  const auto a = modulated_fourier(32, 16, 8);
  const CVec alpha = generate_sparse_signal(32, 2, 3);
  SolverOptions opts;
  opts.dense_gram_limit = 0;
  const auto r = solve_bp(a, a.forward(alpha), opts);
  CHECK((r.alpha_star - alpha).norm() <= 1e-4 * alpha.norm());
}

TEST_CASE("non-convergence is reported, not thrown") {
  const auto a = modulated_fourier(32, 10, 8);
  const CVec y = a.forward(generate_sparse_signal(32, 8, 1));
  SolverOptions opts;
  opts.max_iterations = 3;
  const auto r = solve_bp(a, y, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 3);
  CHECK(std::isfinite(r.objective));
}

TEST_CASE("solver argument checks") {
  const auto a = modulated_fourier(16, 8, 1);
  CHECK_THROWS_AS(solve_bp(a, CVec::Zero(7)), std::invalid_argument);
  CHECK_THROWS_AS(solve_bpdn(a, CVec::Zero(8), -1.0), std::invalid_argument);
  SolverOptions bad;
  bad.max_iterations = 0;
  CHECK_THROWS_AS(solve_bp(a, CVec::Ones(8), bad), std::invalid_argument);
  const auto zero = solve_bp(a, CVec::Zero(8));
  CHECK(zero.alpha_star.norm() == 0.0);
  CHECK(zero.converged);
}
