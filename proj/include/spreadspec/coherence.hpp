#pragma once

#include <cstddef>
#include <utility>

#include "spreadspec/modulation.hpp"
#include "spreadspec/operators.hpp"

namespace spreadspec {

/// Largest-magnitude entry of a Gram-type matrix and where it occurs.
/// Ties resolve to the smallest row, then the smallest column.
struct CoherenceMax {
  double value = 0.0;
  std::size_t row = 0;
  std::size_t col = 0;
};

struct CoherenceReport {
  double mu = 0.0;
  double beta = 0.0;
  std::size_t n_signal = 0;
  std::size_t n_upsampled = 0;
  double product_nw_mu2 = 0.0;
  std::pair<std::size_t, std::size_t> argmax_pair{0, 0};
};

struct Lemma1Result {
  double violation_rate = 0.0;
  std::size_t violations = 0;
  std::size_t trials = 0;
  double beta = 0.0;
  /// beta * sqrt(2 log(2 N^2 / epsilon))
  double bound = 0.0;
  /// Largest modulated coherence observed over all trials.
  double max_observed = 0.0;
};

/// Dense-path cap for modulus_coherence.
inline constexpr std::size_t kDenseCoherenceLimit = 4096;

/// max_j max_i |(chain e_j)_i| over the n_cols columns of chain, one
/// operator application per column. Parallel over columns.
CoherenceMax gram_column_max(const LinearOperator &chain, int threads = 0);

/// mu = max |<phi_i, psi_j>|. Both operators square and of equal size.
double mutual_coherence(const LinearOperator &sensing, const LinearOperator &sparsity,
                        int threads = 0);
CoherenceMax mutual_coherence_detail(const LinearOperator &sensing,
                                     const LinearOperator &sparsity, int threads = 0);

/// beta = max_{i,j} sqrt(sum_k |phi_ki|^2 |psi_kj|^2), evaluated densely.
/// Throws UnsupportedSize above kDenseCoherenceLimit.
double modulus_coherence(const LinearOperator &sensing, const LinearOperator &sparsity,
                         int threads = 0);

/// Coherence of the chirp-modulated analog chain F* C U Psi: mu_w scans all
/// N_w frequency rows against all N sparsity columns.
CoherenceReport analog_coherence(TransformKind sparsity_kind, std::size_t n, double w_bar,
                                 int threads = 0);

/// Fraction of random modulations whose coherence max|<phi_i, C psi_j>|
/// exceeds beta sqrt(2 log(2 N^2 / epsilon)). Trial t uses the modulation
/// seed derive_seed(seed, {t}).
Lemma1Result lemma1_monte_carlo(const LinearOperator &sensing, const LinearOperator &sparsity,
                                ModulationKind kind, double epsilon, std::size_t trials,
                                Seed seed, int threads = 0);

/// Single-threaded reference versions of the kernels above.
namespace serial {
CoherenceMax gram_column_max(const LinearOperator &chain);
double modulus_coherence(const LinearOperator &sensing, const LinearOperator &sparsity);
Lemma1Result lemma1_monte_carlo(const LinearOperator &sensing, const LinearOperator &sparsity,
                                ModulationKind kind, double epsilon, std::size_t trials,
                                Seed seed);
}  // namespace serial

}  // namespace spreadspec
