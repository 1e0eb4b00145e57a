#pragma once

#include <cstddef>
#include <memory>

#include "spreadspec/operators.hpp"

namespace spreadspec {

struct SolverOptions {
  int max_iterations = 5000;
  /// Stop when the relative change of the iterate drops below this.
  double convergence_tol = 1e-8;
  double feasibility_tol = 1e-6;
  /// Douglas-Rachford threshold, relative to max|A* y|.
  double step_parameter = 0.1;
  /// Unused by the default zero start; kept so options round-trip.
  Seed seed = 0;
  /// Largest m for which A A* is materialized and diagonalized. Beyond
  /// it the constraint projection runs conjugate gradients.
  std::size_t dense_gram_limit = 2048;
  /// Inner conjugate-gradient controls for the iterative projection.
  int cg_max_iterations = 200;
  double cg_tol = 1e-12;
};

struct SolverResult {
  CVec alpha_star;
  int iterations = 0;
  /// ||y - A alpha_star||_2
  double residual_norm = 0.0;
  /// ||alpha_star||_1 (sum of complex magnitudes)
  double objective = 0.0;
  bool converged = false;
};

/// Proximal map of t|.|: zero inside the disc of radius t, else shrink
/// the magnitude by t keeping the phase.
Complex complex_soft_threshold(Complex z, double t);
CVec soft_threshold(const CVec &z, double t);

/// Euclidean projection onto {alpha : ||y - A alpha||_2 <= eta}.
///
/// Three strategies, chosen at construction:
///  - A A* = I by construction: closed form.
///  - m <= dense_gram_limit: A A* is built from m applications and
///    diagonalized once; each projection then solves the secular equation
///    for the Lagrange multiplier. Rank-deficient Grams (duplicate rows,
///    m > N) use the pseudo-inverse.
///  - otherwise: conjugate gradients on (mu I + A A*) z = r, with a
///    bracketing search over mu when eta > 0.
/// If the constraint set is empty the least-squares point is returned.
class ConstraintProjector {
 public:
  enum class Strategy { orthonormal_rows, dense_gram, iterative };

  ConstraintProjector(const LinearOperator &a, CVec y, double eta, const SolverOptions &opts);
  ~ConstraintProjector();
  ConstraintProjector(ConstraintProjector &&) noexcept;
  ConstraintProjector &operator=(ConstraintProjector &&) noexcept;

  CVec project(const CVec &alpha) const;
  Strategy strategy() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Basis pursuit denoising, min ||alpha||_1 s.t. ||y - A alpha||_2 <= eta,
/// by Douglas-Rachford splitting between the complex soft threshold and
/// the projection above. eta = 0 gives basis pursuit. Non-convergence is
/// reported through SolverResult::converged, not thrown.
SolverResult solve_bpdn(const LinearOperator &a, const CVec &y, double eta,
                        const SolverOptions &opts = {});

inline SolverResult solve_bp(const LinearOperator &a, const CVec &y,
                             const SolverOptions &opts = {}) {
  return solve_bpdn(a, y, 0.0, opts);
}

}  // namespace spreadspec
