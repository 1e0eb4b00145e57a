#include "spreadspec/coherence.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "spreadspec/parallel.hpp"
#include "spreadspec/rng.hpp"

namespace spreadspec {

namespace {

CoherenceMax column_max(const LinearOperator &chain, std::size_t j) {
  CVec e = CVec::Zero(chain.in_dim());
  e[j] = 1.0;
  const CVec col = chain.forward(e);
  CoherenceMax best{-1.0, 0, j};
  for (Eigen::Index i = 0; i < col.size(); ++i) {
    const double v = std::abs(col[i]);
    if (v > best.value) best = {v, static_cast<std::size_t>(i), j};
  }
  return best;
}

// Order-fixed reduction, so the parallel and serial paths agree bitwise.
CoherenceMax reduce(const std::vector<CoherenceMax> &per_column) {
  CoherenceMax best{-1.0, 0, 0};
  for (const auto &c : per_column) {
    if (c.value > best.value || (c.value == best.value && c.row < best.row)) best = c;
  }
  return best;
}

void require_square_pair(const LinearOperator &sensing, const LinearOperator &sparsity) {
  if (sensing.in_dim() != sensing.out_dim() || sparsity.in_dim() != sparsity.out_dim() ||
      sensing.in_dim() != sparsity.in_dim())
    throw std::invalid_argument("coherence requires square bases of equal size, got " +
                                sensing.label() + " and " + sparsity.label());
}

LinearOperator gram_chain(const LinearOperator &sensing, const LinearOperator &sparsity) {
  return compose(adjoint_of(sensing), sparsity);
}

// Entrywise squared magnitudes of a square operator's matrix.
Eigen::MatrixXd squared_magnitudes(const LinearOperator &op, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(op.in_dim());
  Eigen::MatrixXd out(op.out_dim(), n);
#pragma omp parallel for num_threads(threads) schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    CVec e = CVec::Zero(n);
    e[j] = 1.0;
    out.col(j) = op.forward(e).cwiseAbs2();
  }
  return out;
}

void require_dense_size(std::size_t n) {
  if (n > kDenseCoherenceLimit)
    throw UnsupportedSize("modulus_coherence: N = " + std::to_string(n) +
                          " exceeds dense limit " + std::to_string(kDenseCoherenceLimit));
}

double lemma1_bound(double beta, std::size_t n, double epsilon) {
  const double nn = static_cast<double>(n);
  return beta * std::sqrt(2.0 * std::log(2.0 * nn * nn / epsilon));
}

void check_lemma1_args(double epsilon, std::size_t trials, ModulationKind kind) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("lemma1: epsilon must lie in (0, 1)");
  if (trials == 0) throw std::invalid_argument("lemma1: trials must be >= 1");
  if (kind != ModulationKind::rademacher && kind != ModulationKind::steinhaus)
    throw std::invalid_argument("lemma1: modulation must be rademacher or steinhaus");
}

double modulated_coherence(const LinearOperator &sensing, const LinearOperator &sparsity,
                           ModulationKind kind, Seed trial_seed) {
  const auto mod = make_random_modulation(kind, sparsity.in_dim(), trial_seed);
  const auto chain = compose(adjoint_of(sensing), compose(modulation_operator(mod), sparsity));
  return serial::gram_column_max(chain).value;
}

Lemma1Result summarize(std::vector<double> observed, double beta, double bound) {
  Lemma1Result r;
  r.trials = observed.size();
  r.beta = beta;
  r.bound = bound;
  for (double v : observed) {
    if (v > bound) ++r.violations;
    r.max_observed = std::max(r.max_observed, v);
  }
  r.violation_rate = static_cast<double>(r.violations) / static_cast<double>(r.trials);
  return r;
}

}  // namespace

namespace serial {

CoherenceMax gram_column_max(const LinearOperator &chain) {
  std::vector<CoherenceMax> per_column(chain.in_dim());
  for (std::size_t j = 0; j < chain.in_dim(); ++j) per_column[j] = column_max(chain, j);
  return reduce(per_column);
}

double modulus_coherence(const LinearOperator &sensing, const LinearOperator &sparsity) {
  require_square_pair(sensing, sparsity);
  const std::size_t n = sensing.in_dim();
  require_dense_size(n);
  const CMat phi = to_dense(sensing);
  const CMat psi = to_dense(sparsity);
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += std::norm(phi(k, i)) * std::norm(psi(k, j));
      best = std::max(best, acc);
    }
  }
  return std::sqrt(best);
}

Lemma1Result lemma1_monte_carlo(const LinearOperator &sensing, const LinearOperator &sparsity,
                                ModulationKind kind, double epsilon, std::size_t trials,
                                Seed seed) {
  check_lemma1_args(epsilon, trials, kind);
  require_square_pair(sensing, sparsity);
  const double beta = serial::modulus_coherence(sensing, sparsity);
  std::vector<double> observed(trials);
  for (std::size_t t = 0; t < trials; ++t)
    observed[t] = modulated_coherence(sensing, sparsity, kind, derive_seed(seed, {t}));
  return summarize(std::move(observed), beta, lemma1_bound(beta, sensing.in_dim(), epsilon));
}

}  // namespace serial

CoherenceMax gram_column_max(const LinearOperator &chain, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(chain.in_dim());
  std::vector<CoherenceMax> per_column(n);
#pragma omp parallel for num_threads(resolve_threads(threads)) schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) per_column[j] = column_max(chain, j);
  return reduce(per_column);
}

CoherenceMax mutual_coherence_detail(const LinearOperator &sensing,
                                     const LinearOperator &sparsity, int threads) {
  require_square_pair(sensing, sparsity);
  return gram_column_max(gram_chain(sensing, sparsity), threads);
}

double mutual_coherence(const LinearOperator &sensing, const LinearOperator &sparsity,
                        int threads) {
  return mutual_coherence_detail(sensing, sparsity, threads).value;
}

double modulus_coherence(const LinearOperator &sensing, const LinearOperator &sparsity,
                         int threads) {
  require_square_pair(sensing, sparsity);
  require_dense_size(sensing.in_dim());
  const int nt = resolve_threads(threads);
  const Eigen::MatrixXd phi2 = squared_magnitudes(sensing, nt);
  const Eigen::MatrixXd psi2 = squared_magnitudes(sparsity, nt);
  const auto n = static_cast<std::ptrdiff_t>(sensing.in_dim());
  std::vector<double> col_best(n);
#pragma omp parallel for num_threads(nt) schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j)
    col_best[j] = (phi2.transpose() * psi2.col(j)).maxCoeff();
  double best = 0.0;
  for (double v : col_best) best = std::max(best, v);
  return std::sqrt(best);
}

CoherenceReport analog_coherence(TransformKind sparsity_kind, std::size_t n, double w_bar,
                                 int threads) {
  if (!is_power_of_two(n) || n < 2)
    throw std::invalid_argument("analog_coherence: n must be an even power of two");
  const auto chirp = make_chirp_modulation(w_bar, n);
  const std::size_t nw = chirp.n_upsampled;
  const auto sparsity = make_transform(sparsity_kind, n);
  // Columns of C U Psi, then their unitary spectra.
  const auto modulated = compose(modulation_operator(chirp), compose(make_upsampler(n, nw), sparsity));
  const auto chain = compose(adjoint_of(make_transform(TransformKind::fourier, nw)), modulated);
  const auto best = gram_column_max(chain, threads);

  // Every Fourier entry has magnitude N_w^{-1/2}, so beta of the analog
  // system is max_j ||C U psi_j|| / sqrt(N_w).
  double max_col_norm = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    CVec e = CVec::Zero(n);
    e[j] = 1.0;
    max_col_norm = std::max(max_col_norm, modulated.forward(e).norm());
  }

  CoherenceReport r;
  r.mu = best.value;
  r.beta = max_col_norm / std::sqrt(static_cast<double>(nw));
  r.n_signal = n;
  r.n_upsampled = nw;
  r.product_nw_mu2 = static_cast<double>(nw) * best.value * best.value;
  r.argmax_pair = {best.row, best.col};
  return r;
}

Lemma1Result lemma1_monte_carlo(const LinearOperator &sensing, const LinearOperator &sparsity,
                                ModulationKind kind, double epsilon, std::size_t trials,
                                Seed seed, int threads) {
  check_lemma1_args(epsilon, trials, kind);
  require_square_pair(sensing, sparsity);
  const int nt = resolve_threads(threads);
  const double beta = modulus_coherence(sensing, sparsity, nt);
  std::vector<double> observed(trials);
  const auto count = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for num_threads(nt) schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < count; ++t)
    observed[t] = modulated_coherence(sensing, sparsity, kind,
                                      derive_seed(seed, {static_cast<std::uint64_t>(t)}));
  return summarize(std::move(observed), beta, lemma1_bound(beta, sensing.in_dim(), epsilon));
}

}  // namespace spreadspec
