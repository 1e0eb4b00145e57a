#include "spreadspec/experiments.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <string>

#include "spreadspec/parallel.hpp"
#include "spreadspec/rng.hpp"

namespace spreadspec {

namespace {

enum Stream : std::uint64_t { kSignal = 1, kModulation = 2, kRows = 3, kNoise = 4 };

std::string digest(const nlohmann::ordered_json &config) {
  // FNV-1a over the canonical dump.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::ordered_json solver_json(const TrialOptions &t) {
  return {{"max_iterations", t.solver.max_iterations},
          {"convergence_tol", t.solver.convergence_tol},
          {"feasibility_tol", t.solver.feasibility_tol},
          {"step_parameter", t.solver.step_parameter},
          {"recovery_threshold", t.recovery_threshold}};
}

struct WorkCell {
  ExperimentCell cell;
  SensingConfig config;
};

void run_cells(std::vector<WorkCell> &work, std::size_t trials, const ExecutionOptions &exec,
               bool parallel) {
  const std::size_t total = work.size() * trials;
  std::vector<unsigned char> success(total, 0);
  auto run_item = [&](std::size_t item) {
    const auto &w = work[item / trials];
    const Seed trial_seed = derive_seed(w.cell.base_seed, {item % trials});
    success[item] = run_trial(w.config, trial_seed, exec.trial).recovered ? 1 : 0;
  };
  if (parallel) {
    const auto count = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for num_threads(resolve_threads(exec.threads)) schedule(dynamic, 1)
    for (std::ptrdiff_t item = 0; item < count; ++item) run_item(static_cast<std::size_t>(item));
  } else {
    for (std::size_t item = 0; item < total; ++item) run_item(item);
  }
  for (std::size_t c = 0; c < work.size(); ++c) {
    auto &cell = work[c].cell;
    cell.trials = trials;
    cell.successes = static_cast<std::size_t>(
        std::accumulate(success.begin() + static_cast<std::ptrdiff_t>(c * trials),
                        success.begin() + static_cast<std::ptrdiff_t>((c + 1) * trials), 0));
    cell.probability = static_cast<double>(cell.successes) / static_cast<double>(trials);
  }
}

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

ExperimentReport finish(ExperimentReport report, std::vector<WorkCell> &work, std::size_t trials,
                        const ExecutionOptions &exec, bool parallel) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  run_cells(work, trials, exec, parallel);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<std::size_t> s_axis, m_axis;
  std::vector<double> w_axis;
  for (const auto &w : work) {
    report.cells.push_back(w.cell);
    s_axis.push_back(w.cell.s);
    m_axis.push_back(w.cell.m);
    w_axis.push_back(w.cell.w_bar);
  }
  report.s_axis = sorted_unique(s_axis);
  report.m_axis = sorted_unique(m_axis);
  report.w_bar_axis = sorted_unique(w_axis);
  report.config_digest = digest(report.config);
  return report;
}

std::vector<WorkCell> phase_transition_cells(const PhaseTransitionParams &p,
                                             ExperimentReport &report) {
  if (p.s_grid.empty()) throw std::invalid_argument("phase_transition: empty s grid");
  std::vector<WorkCell> work;
  for (auto s : p.s_grid) {
    const auto m_values = p.m_rule.values_for(s);
    if (m_values.empty()) throw std::invalid_argument("phase_transition: empty m grid");
    for (auto m : m_values) {
      SensingConfig cfg;
      cfg.sensing_kind = p.sensing_kind;
      cfg.sparsity_kind = p.sparsity_kind;
      cfg.modulation.kind = p.modulation_kind;
      cfg.n = p.n;
      cfg.m = m;
      cfg.s = s;
      cfg.index_law = p.index_law;
      cfg.snr_db = p.snr_db;
      cfg.seed = p.seed;
      ExperimentCell cell{s, m, 0.0, 0, 0, 0.0, cell_seed(p.seed, s, m, 0.0)};
      if (m > measurement_space_size(cfg)) {
        report.skipped.push_back(cell);
        continue;
      }
      validate(cfg);
      work.push_back({cell, cfg});
    }
  }
  return work;
}

ExperimentReport phase_transition_report(const PhaseTransitionParams &p,
                                         const ExecutionOptions &exec) {
  ExperimentReport report;
  report.experiment = "phase_transition";
  nlohmann::ordered_json m_rule;
  if (p.m_rule.explicit_m.empty())
    m_rule["multiples"] = p.m_rule.multiples;
  else
    m_rule["m"] = p.m_rule.explicit_m;
  report.config = {{"sensing", to_string(p.sensing_kind)},
                   {"sparsity", to_string(p.sparsity_kind)},
                   {"modulation", to_string(p.modulation_kind)},
                   {"n", p.n},
                   {"s_grid", p.s_grid},
                   {"m_rule", m_rule},
                   {"trials", p.trials},
                   {"seed", p.seed},
                   {"index_law", to_string(p.index_law)},
                   {"snr_db", p.snr_db ? nlohmann::ordered_json(*p.snr_db) : nullptr},
                   {"solver", solver_json(exec.trial)}};
  return report;
}

std::vector<WorkCell> recovery_curve_cells(const RecoveryCurveParams &p,
                                           ExperimentReport &report) {
  if (p.w_bar_list.empty()) throw std::invalid_argument("recovery_curve: empty chirp-rate list");
  const auto m_grid = p.m_grid.empty() ? geometric_grid(p.s, p.n, 20) : p.m_grid;
  std::vector<WorkCell> work;
  for (double w : p.w_bar_list) {
    for (auto m : m_grid) {
      SensingConfig cfg;
      cfg.sensing_kind = TransformKind::fourier;
      cfg.sparsity_kind = p.sparsity_kind;
      cfg.modulation = {ModulationKind::chirp, w};
      cfg.n = p.n;
      cfg.m = m;
      cfg.s = p.s;
      cfg.index_law = p.index_law;
      cfg.seed = p.seed;
      ExperimentCell cell{p.s, m, w, 0, 0, 0.0, cell_seed(p.seed, p.s, m, w)};
      if (m > measurement_space_size(cfg)) {
        report.skipped.push_back(cell);
        continue;
      }
      validate(cfg);
      work.push_back({cell, cfg});
    }
  }
  return work;
}

ExperimentReport recovery_curve_report(const RecoveryCurveParams &p,
                                       const ExecutionOptions &exec) {
  ExperimentReport report;
  report.experiment = "recovery_curve";
  report.config = {{"sensing", "fourier"},
                   {"sparsity", to_string(p.sparsity_kind)},
                   {"modulation", "chirp"},
                   {"n", p.n},
                   {"s", p.s},
                   {"w_bar_list", p.w_bar_list},
                   {"m_grid", p.m_grid.empty() ? geometric_grid(p.s, p.n, 20) : p.m_grid},
                   {"trials", p.trials},
                   {"seed", p.seed},
                   {"index_law", to_string(p.index_law)},
                   {"solver", solver_json(exec.trial)}};
  return report;
}

}  // namespace

std::size_t measurement_space_size(const SensingConfig &config) {
  if (config.modulation.kind == ModulationKind::chirp)
    return upsampled_size(config.modulation.w_bar, config.n);
  return config.n;
}

void validate(const SensingConfig &c) {
  if (c.n == 0) throw std::invalid_argument("n must be positive");
  if (c.s < 1 || c.s > c.n)
    throw std::invalid_argument("s = " + std::to_string(c.s) + " outside [1, " +
                                std::to_string(c.n) + "]");
  for (auto kind : {c.sensing_kind, c.sparsity_kind})
    if ((kind == TransformKind::hadamard || kind == TransformKind::haar) && !is_power_of_two(c.n))
      throw std::invalid_argument(std::string(to_string(kind)) + " needs n a power of two");
  if (c.modulation.kind == ModulationKind::chirp) {
    if (c.sensing_kind != TransformKind::fourier)
      throw std::invalid_argument("chirp modulation requires fourier sensing");
    if (c.n % 2 != 0) throw std::invalid_argument("chirp modulation requires even n");
    if (!(c.modulation.w_bar >= 0.0)) throw std::invalid_argument("chirp rate must be >= 0");
  }
  const auto rows = measurement_space_size(c);
  if (c.m < 1 || c.m > rows)
    throw std::invalid_argument("m = " + std::to_string(c.m) + " outside [1, " +
                                std::to_string(rows) + "]");
  if (c.snr_db && !std::isfinite(*c.snr_db)) throw std::invalid_argument("snr_db must be finite");
}

SensingSystem build_system(const SensingConfig &config, Seed trial_seed) {
  validate(config);
  const auto sparsity = make_transform(config.sparsity_kind, config.n);
  ModulationSpec mod;
  LinearOperator modulated = sparsity;
  LinearOperator sensing = make_transform(config.sensing_kind, config.n);
  switch (config.modulation.kind) {
    case ModulationKind::none: mod = make_no_modulation(config.n); break;
    case ModulationKind::rademacher:
    case ModulationKind::steinhaus:
      mod = make_random_modulation(config.modulation.kind, config.n,
                                   derive_seed(trial_seed, {kModulation}));
      modulated = compose(modulation_operator(mod), sparsity);
      break;
    case ModulationKind::chirp:
      mod = make_chirp_modulation(config.modulation.w_bar, config.n);
      modulated = compose(modulation_operator(mod),
                          compose(make_upsampler(config.n, mod.n_upsampled), sparsity));
      sensing = make_transform(TransformKind::fourier, mod.n_upsampled);
      break;
  }
  auto omega = sample_indices(config.index_law, config.m, mod.n_upsampled,
                              derive_seed(trial_seed, {kRows}));
  auto a = compose(restrict_rows(adjoint_of(sensing), omega), modulated);
  return {std::move(a), sparsity, std::move(omega), std::move(mod)};
}

CVec generate_sparse_signal(std::size_t n, std::size_t s, Seed seed) {
  if (s > n) throw std::invalid_argument("sparsity exceeds signal length");
  const auto support =
      sample_indices(IndexLaw::uniform_without_replacement, s, n, derive_seed(seed, {0}));
  Rng rng(derive_seed(seed, {1}));
  CVec alpha = CVec::Zero(n);
  for (auto k : support.indices) {
    // Amplitude 0 has probability 2^-53; redraw so the support is exact.
    double amp;
    do {
      amp = rng.uniform();
    } while (amp == 0.0);
    alpha[k] = amp * rng.unit_phase();
  }
  return alpha;
}

double sample_std(const CVec &x) {
  if (x.size() < 2) return 0.0;
  const Complex mean = x.mean();
  return std::sqrt((x.array() - mean).abs2().sum() / static_cast<double>(x.size() - 1));
}

double noise_sigma(double snr_db, double signal_std) {
  return signal_std * std::pow(10.0, -snr_db / 20.0);
}

CVec add_noise(const CVec &y, double snr_db, double signal_std, Seed seed) {
  const double sigma = noise_sigma(snr_db, signal_std);
  const double per_part = sigma / std::sqrt(2.0);
  Rng rng(seed);
  CVec out = y;
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    const double re = rng.normal();
    const double im = rng.normal();
    out[k] += per_part * Complex(re, im);
  }
  return out;
}

double best_s_term_error(const CVec &alpha, std::size_t s) {
  const auto n = static_cast<std::size_t>(alpha.size());
  if (s > n) throw std::invalid_argument("best_s_term_error: s exceeds length");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(alpha[a]) > std::abs(alpha[b]);
  });
  double err = 0.0;
  for (std::size_t k = s; k < n; ++k) err += std::abs(alpha[order[k]]);
  return err;
}

Reconstruction reconstruct(const SensingConfig &config, Seed trial_seed,
                           const TrialOptions &opts) {
  const auto system = build_system(config, trial_seed);
  Reconstruction out;
  out.alpha = generate_sparse_signal(config.n, config.s, derive_seed(trial_seed, {kSignal}));
  out.x = system.sparsity.forward(out.alpha);
  CVec y = system.a.forward(out.alpha);
  double eta = 0.0;
  if (config.snr_db) {
    const CVec noisy =
        add_noise(y, *config.snr_db, sample_std(out.x), derive_seed(trial_seed, {kNoise}));
    eta = (noisy - y).norm();
    y = noisy;
  }
  out.solver = solve_bpdn(system.a, y, eta, opts.solver);
  out.x_star = system.sparsity.forward(out.solver.alpha_star);
  auto &t = out.trial;
  t.rel_error = (out.x - out.x_star).norm() / out.x.norm();
  t.recovered = t.rel_error <= opts.recovery_threshold;
  t.iterations = out.solver.iterations;
  t.converged = out.solver.converged;
  t.eta = eta;
  return out;
}

std::vector<std::size_t> MRule::values_for(std::size_t s) const {
  if (!explicit_m.empty()) return explicit_m;
  std::vector<std::size_t> out;
  for (auto k : multiples) out.push_back(k * s);
  return out;
}

std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, std::size_t points) {
  if (lo == 0 || hi < lo || points == 0) throw std::invalid_argument("geometric_grid: bad range");
  std::set<std::size_t> values;
  if (points == 1) return {lo};
  const double ratio = std::log(static_cast<double>(hi) / static_cast<double>(lo)) /
                       static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k)
    values.insert(static_cast<std::size_t>(
        std::llround(static_cast<double>(lo) * std::exp(ratio * static_cast<double>(k)))));
  values.insert(lo);
  values.insert(hi);
  return {values.begin(), values.end()};
}

const ExperimentCell *ExperimentReport::find(std::size_t s, std::size_t m, double w_bar) const {
  for (const auto &c : cells)
    if (c.s == s && c.m == m && c.w_bar == w_bar) return &c;
  return nullptr;
}

Seed cell_seed(Seed seed, std::size_t s, std::size_t m, double w_bar) {
  return derive_seed(seed, {s, m, std::bit_cast<std::uint64_t>(w_bar)});
}

ExperimentReport phase_transition(const PhaseTransitionParams &params,
                                  const ExecutionOptions &exec) {
  auto report = phase_transition_report(params, exec);
  auto work = phase_transition_cells(params, report);
  return finish(std::move(report), work, params.trials, exec, true);
}

ExperimentReport recovery_curve(const RecoveryCurveParams &params, const ExecutionOptions &exec) {
  auto report = recovery_curve_report(params, exec);
  auto work = recovery_curve_cells(params, report);
  return finish(std::move(report), work, params.trials, exec, true);
}

namespace serial {

ExperimentReport phase_transition(const PhaseTransitionParams &params,
                                  const ExecutionOptions &exec) {
  auto report = phase_transition_report(params, exec);
  auto work = phase_transition_cells(params, report);
  return finish(std::move(report), work, params.trials, exec, false);
}

ExperimentReport recovery_curve(const RecoveryCurveParams &params, const ExecutionOptions &exec) {
  auto report = recovery_curve_report(params, exec);
  auto work = recovery_curve_cells(params, report);
  return finish(std::move(report), work, params.trials, exec, false);
}

}  // namespace serial

}  // namespace spreadspec
