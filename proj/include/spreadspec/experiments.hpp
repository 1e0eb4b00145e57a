#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spreadspec/modulation.hpp"
#include "spreadspec/operators.hpp"
#include "spreadspec/solver.hpp"

namespace spreadspec {

struct ModulationChoice {
  ModulationKind kind = ModulationKind::none;
  /// Chirp rate; only read when kind == chirp.
  double w_bar = 0.0;
};

/// One acquisition setup. Randomness (signal, modulation, rows, noise)
/// comes from the trial seed handed to run_trial; `seed` is the base seed
/// experiment drivers derive trial seeds from.
struct SensingConfig {
  TransformKind sensing_kind = TransformKind::fourier;
  TransformKind sparsity_kind = TransformKind::dirac;
  ModulationChoice modulation;
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t s = 0;
  IndexLaw index_law = IndexLaw::iid_uniform;
  std::optional<double> snr_db;
  Seed seed = 0;
};

/// Number of rows the measurement indices are drawn from (N, or N_w for chirp).
std::size_t measurement_space_size(const SensingConfig &config);

/// Throws std::invalid_argument describing the first violated constraint.
void validate(const SensingConfig &config);

/// A realized sensing chain y = A alpha together with its sparsity basis.
struct SensingSystem {
  LinearOperator a;
  LinearOperator sparsity;
  IndexSet omega;
  ModulationSpec modulation;
};

/// Builds Phi*_Omega Psi, Phi*_Omega C Psi, or F*_Omega C U Psi according to
/// the modulation kind. Random parts use seeds derived from trial_seed.
SensingSystem build_system(const SensingConfig &config, Seed trial_seed);

/// s-sparse coefficients: support uniform without replacement, amplitudes
/// U[0,1], phases uniform.
CVec generate_sparse_signal(std::size_t n, std::size_t s, Seed seed);

/// Sample standard deviation of a complex vector (N - 1 normalization).
double sample_std(const CVec &x);

/// sigma such that -10 log10(sigma^2 / signal_std^2) = snr_db.
double noise_sigma(double snr_db, double signal_std);

/// Adds i.i.d. circular complex Gaussian noise with E|n_k|^2 = sigma^2.
CVec add_noise(const CVec &y, double snr_db, double signal_std, Seed seed);

/// ||alpha - T_s(alpha)||_1, T_s keeping the s largest magnitudes
/// (ties to the lowest index).
double best_s_term_error(const CVec &alpha, std::size_t s);

struct TrialOptions {
  SolverOptions solver;
  /// Recovery means ||x - x*||_2 <= threshold ||x||_2.
  double recovery_threshold = 1e-3;
};

struct TrialResult {
  bool recovered = false;
  double rel_error = 0.0;
  int iterations = 0;
  bool converged = false;
  double eta = 0.0;
};

/// Everything produced by one acquisition and recovery.
struct Reconstruction {
  CVec alpha;
  CVec x;
  CVec x_star;
  SolverResult solver;
  TrialResult trial;
};

/// Generates alpha, measures it through build_system (adding noise when
/// snr_db is set, with eta the realized noise norm), solves and scores.
Reconstruction reconstruct(const SensingConfig &config, Seed trial_seed,
                           const TrialOptions &opts = {});

inline TrialResult run_trial(const SensingConfig &config, Seed trial_seed,
                             const TrialOptions &opts = {}) {
  return reconstruct(config, trial_seed, opts).trial;
}

/// m values for a sparsity level: explicit values when given, else k * s
/// for each multiplier k (default 1..10).
struct MRule {
  std::vector<std::size_t> multiples{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<std::size_t> explicit_m;

  std::vector<std::size_t> values_for(std::size_t s) const;
};

/// Roughly geometric grid of `points` distinct integers from lo to hi.
std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, std::size_t points);

struct ExperimentCell {
  std::size_t s = 0;
  std::size_t m = 0;
  double w_bar = 0.0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double probability = 0.0;
  Seed base_seed = 0;
};

struct ExperimentReport {
  std::string experiment;
  nlohmann::ordered_json config;
  std::vector<std::size_t> s_axis;
  std::vector<std::size_t> m_axis;
  std::vector<double> w_bar_axis;
  std::vector<ExperimentCell> cells;
  /// (s, m, w_bar) combinations dropped because m exceeded the row count.
  std::vector<ExperimentCell> skipped;
  std::string config_digest;
  double runtime_seconds = 0.0;

  const ExperimentCell *find(std::size_t s, std::size_t m, double w_bar = 0.0) const;
};

struct ExecutionOptions {
  /// 0 = OpenMP default.
  int threads = 0;
  TrialOptions trial;
};

struct PhaseTransitionParams {
  TransformKind sensing_kind = TransformKind::fourier;
  TransformKind sparsity_kind = TransformKind::dirac;
  ModulationKind modulation_kind = ModulationKind::rademacher;
  std::size_t n = 128;
  std::vector<std::size_t> s_grid{4, 8, 16};
  MRule m_rule;
  std::size_t trials = 50;
  Seed seed = 0;
  IndexLaw index_law = IndexLaw::iid_uniform;
  std::optional<double> snr_db;
};

struct RecoveryCurveParams {
  TransformKind sparsity_kind = TransformKind::dirac;
  std::size_t n = 256;
  std::size_t s = 10;
  std::vector<double> w_bar_list{0.0, 0.1, 0.25, 0.5};
  /// Empty means geometric_grid(s, n, 20).
  std::vector<std::size_t> m_grid;
  std::size_t trials = 50;
  Seed seed = 0;
  IndexLaw index_law = IndexLaw::iid_uniform;
};

/// Per-cell seed: derive_seed(seed, {s, m, bits(w_bar)}); trial t of the
/// cell uses derive_seed(cell_seed, {t}).
Seed cell_seed(Seed seed, std::size_t s, std::size_t m, double w_bar);

/// Empirical recovery probability over an (s, m) grid. Trials run in
/// parallel; counts are identical for any thread count.
ExperimentReport phase_transition(const PhaseTransitionParams &params,
                                  const ExecutionOptions &exec = {});

/// Chirp-modulated analog chain, recovery probability per (w_bar, m).
ExperimentReport recovery_curve(const RecoveryCurveParams &params,
                                const ExecutionOptions &exec = {});

/// Single-threaded reference harness (same seeds, plain loops).
namespace serial {
ExperimentReport phase_transition(const PhaseTransitionParams &params,
                                  const ExecutionOptions &exec = {});
ExperimentReport recovery_curve(const RecoveryCurveParams &params,
                                const ExecutionOptions &exec = {});
}  // namespace serial

}  // namespace spreadspec
