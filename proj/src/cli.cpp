#include "spreadspec/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spreadspec/coherence.hpp"
#include "spreadspec/experiments.hpp"
#include "spreadspec/report_io.hpp"

namespace spreadspec::cli {

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kCommands{"coherence-table", "lemma1-check", "phase-transition",
                                         "recovery-curve", "reconstruct"};

std::string json_value_to_arg(const nlohmann::json &v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string joined;
    for (const auto &item : v) {
      if (!joined.empty()) joined += ',';
      joined += json_value_to_arg(item);
    }
    return joined;
  }
  return v.dump();
}

bool has_flag(const std::vector<std::string> &args, const std::string &flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string &a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Common knobs shared by every subcommand.
struct Common {
  std::string output;
  std::string format = "auto";
  std::string threads = "auto";
  bool timing = false;
  int max_iterations = SolverOptions{}.max_iterations;
  double tol = SolverOptions{}.convergence_tol;
  double step = SolverOptions{}.step_parameter;
  double threshold = TrialOptions{}.recovery_threshold;
};

void add_common(CLI::App *cmd, Common &c, bool solver_flags) {
  cmd->add_option("-o,--output", c.output, "Artifact path");
  cmd->add_option("--format", c.format, "auto, csv or json (auto: by extension)")
      ->check(CLI::IsMember({"auto", "csv", "json"}));
  cmd->add_option("--threads", c.threads, "Worker threads or 'auto'");
  cmd->add_option("--config", "JSON file with flag values");
  if (solver_flags) {
    cmd->add_flag("--timing", c.timing, "Include runtime in JSON reports");
    cmd->add_option("--max-iter", c.max_iterations, "Solver iteration cap");
    cmd->add_option("--tol", c.tol, "Solver relative-change tolerance");
    cmd->add_option("--step", c.step, "Douglas-Rachford step, relative to max|A*y|");
    cmd->add_option("--threshold", c.threshold, "Relative l2 error counted as recovery");
  }
}

int parse_threads(const std::string &s) {
  if (s == "auto") return 0;
  try {
    std::size_t used = 0;
    const int t = std::stoi(s, &used);
    if (used == s.size() && t >= 1) return t;
  } catch (const std::exception &) {
  }
  throw ConfigError("--threads must be 'auto' or a positive integer, got '" + s + "'");
}

ExecutionOptions execution(const Common &c) {
  ExecutionOptions e;
  e.threads = parse_threads(c.threads);
  e.trial.solver.max_iterations = c.max_iterations;
  e.trial.solver.convergence_tol = c.tol;
  e.trial.solver.step_parameter = c.step;
  e.trial.recovery_threshold = c.threshold;
  return e;
}

bool wants_json(const Common &c) {
  if (c.format != "auto") return c.format == "json";
  return std::filesystem::path(c.output).extension() == ".json";
}

void write_artifact(const Common &c, const std::string &text) {
  if (c.output.empty()) return;
  std::ofstream f(c.output, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + c.output + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing '" + c.output + "'");
}

template <typename T>
T parse_enum(T (*parser)(std::string_view), const std::string &value) {
  try {
    return parser(value);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
}

std::string where(const Common &c) { return c.output.empty() ? "" : " -> " + c.output; }

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string> &args) {
  auto it = std::find_if(args.begin(), args.end(), [](const std::string &a) {
    return a == "--config" || a.rfind("--config=", 0) == 0;
  });
  if (it == args.end()) return args;
  std::string path;
  std::vector<std::string> rest(args.begin(), it);
  if (*it == "--config") {
    if (std::next(it) == args.end()) throw ConfigError("--config needs a file argument");
    path = *std::next(it);
    rest.insert(rest.end(), std::next(it, 2), args.end());
  } else {
    path = it->substr(std::string("--config=").size());
    rest.insert(rest.end(), std::next(it), args.end());
  }
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");

  const bool has_command =
      std::any_of(rest.begin(), rest.end(), [](const std::string &a) {
        return std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end();
      });
  std::vector<std::string> out;
  if (j.contains("command") && !has_command) out.push_back(j["command"].get<std::string>());
  out.insert(out.end(), rest.begin(), rest.end());
  for (const auto &[key, value] : j.items()) {
    if (key == "command") continue;
    const std::string flag = key == "o" ? "-o" : "--" + key;
    if (has_flag(rest, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
      continue;
    }
    out.push_back(flag);
    out.push_back(json_value_to_arg(value));
  }
  return out;
}

int run(const std::vector<std::string> &raw_args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Spread spectrum compressed sensing experiments", "spreadspec"};
  app.require_subcommand(1);

  // coherence-table
  Common ct_common;
  std::size_t ct_n = 1024;
  std::vector<std::string> ct_sparsity{"dirac", "fourier"};
  std::vector<double> ct_wbar{0.0, 0.1, 0.25, 0.5};
  auto *ct = app.add_subcommand("coherence-table", "N_w mu_w^2 of the chirp-modulated chain");
  ct->add_option("--n", ct_n, "Signal size (power of two)");
  ct->add_option("--sparsity", ct_sparsity, "Sparsity bases")->delimiter(',');
  ct->add_option("--wbar", ct_wbar, "Chirp rates")->delimiter(',');
  add_common(ct, ct_common, false);

  // lemma1-check
  Common lm_common;
  std::string lm_sensing = "fourier", lm_sparsity = "haar", lm_mod = "rademacher";
  std::size_t lm_n = 64, lm_trials = 500;
  std::vector<double> lm_eps{0.05, 0.2};
  Seed lm_seed = 0;
  auto *lm = app.add_subcommand("lemma1-check", "Monte Carlo check of the modulated coherence tail bound");
  lm->add_option("--sensing", lm_sensing);
  lm->add_option("--sparsity", lm_sparsity);
  lm->add_option("--modulation", lm_mod);
  lm->add_option("--n", lm_n);
  lm->add_option("--epsilon", lm_eps)->delimiter(',');
  lm->add_option("--trials", lm_trials);
  lm->add_option("--seed", lm_seed);
  add_common(lm, lm_common, false);

  // phase-transition
  Common pt_common;
  PhaseTransitionParams pt;
  std::string pt_sensing = "fourier", pt_sparsity = "dirac", pt_mod = "rademacher",
              pt_law = "iid_uniform";
  std::optional<double> pt_snr;
  auto *ptc = app.add_subcommand("phase-transition", "Recovery probability over an (s, m) grid");
  ptc->add_option("--sensing", pt_sensing);
  ptc->add_option("--sparsity", pt_sparsity);
  ptc->add_option("--modulation", pt_mod, "none, rademacher or steinhaus");
  ptc->add_option("--n", pt.n);
  ptc->add_option("--s", pt.s_grid, "Sparsity levels")->delimiter(',');
  ptc->add_option("--m", pt.m_rule.explicit_m, "Explicit m values (overrides --m-multiples)")
      ->delimiter(',');
  ptc->add_option("--m-multiples", pt.m_rule.multiples, "m = k s for each k")->delimiter(',');
  ptc->add_option("--trials", pt.trials);
  ptc->add_option("--seed", pt.seed);
  ptc->add_option("--law", pt_law, "iid_uniform or uniform_without_replacement");
  ptc->add_option("--snr", pt_snr, "Input SNR in dB (noiseless when absent)");
  add_common(ptc, pt_common, true);

  // recovery-curve
  Common rc_common;
  RecoveryCurveParams rc;
  std::string rc_sparsity = "dirac", rc_law = "iid_uniform";
  auto *rcc = app.add_subcommand("recovery-curve", "Recovery probability versus m for chirp rates");
  rcc->add_option("--sparsity", rc_sparsity);
  rcc->add_option("--n", rc.n);
  rcc->add_option("--s", rc.s);
  rcc->add_option("--wbar", rc.w_bar_list)->delimiter(',');
  rcc->add_option("--m", rc.m_grid, "m values (default: 20-point geometric grid s..N)")
      ->delimiter(',');
  rcc->add_option("--trials", rc.trials);
  rcc->add_option("--seed", rc.seed);
  rcc->add_option("--law", rc_law);
  add_common(rcc, rc_common, true);

  // reconstruct
  Common re_common;
  SensingConfig re;
  re.n = 64;
  re.s = 4;
  re.m = 32;
  std::string re_sensing = "fourier", re_sparsity = "dirac", re_mod = "rademacher",
              re_law = "iid_uniform";
  double re_wbar = 0.0;
  auto *rec = app.add_subcommand("reconstruct", "Single acquisition and recovery");
  rec->add_option("--n", re.n);
  rec->add_option("--s", re.s);
  rec->add_option("--m", re.m);
  rec->add_option("--sensing", re_sensing);
  rec->add_option("--sparsity", re_sparsity);
  rec->add_option("--modulation", re_mod, "none, rademacher, steinhaus or chirp");
  rec->add_option("--wbar", re_wbar, "Chirp rate (chirp modulation only)");
  rec->add_option("--law", re_law);
  rec->add_option("--snr", re.snr_db, "Input SNR in dB");
  rec->add_option("--seed", re.seed);
  add_common(rec, re_common, true);

  try {
    const auto args = expand_config(raw_args);
    std::vector<std::string> argv_storage{"spreadspec"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto &a : argv_storage) argv.push_back(a.data());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &e) {
      out << app.help();
      return kOk;
    } catch (const CLI::CallForAllHelp &e) {
      out << app.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::ParseError &e) {
      err << "error: " << e.what() << "\n\n" << app.help();
      return kInvalidConfig;
    }

    if (ct->parsed()) {
      std::vector<CoherenceRow> rows;
      const int threads = parse_threads(ct_common.threads);
      for (const auto &name : ct_sparsity) {
        const auto kind = parse_enum(parse_transform_kind, name);
        for (double w : ct_wbar) {
          if (w < 0.0) throw ConfigError("chirp rates must be non-negative");
          if (!is_power_of_two(ct_n) || ct_n < 2)
            throw ConfigError("--n must be a power of two >= 2");
          rows.push_back({kind, w, analog_coherence(kind, ct_n, w, threads)});
        }
      }
      write_artifact(ct_common, wants_json(ct_common) ? coherence_table_json(rows).dump(2) + "\n"
                                                      : coherence_table_csv(rows));
      out << "coherence-table: " << rows.size() << " rows, N=" << ct_n << where(ct_common)
          << "\n";
      return kOk;
    }

    if (lm->parsed()) {
      const auto sensing = make_transform(parse_enum(parse_transform_kind, lm_sensing), lm_n);
      const auto sparsity = make_transform(parse_enum(parse_transform_kind, lm_sparsity), lm_n);
      const auto kind = parse_enum(parse_modulation_kind, lm_mod);
      const int threads = parse_threads(lm_common.threads);
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      std::ostringstream csv;
      csv << "epsilon,trials,violations,violation_rate,beta,bound,max_observed\n";
      std::ostringstream summary;
      for (double eps : lm_eps) {
        const auto r = lemma1_monte_carlo(sensing, sparsity, kind, eps, lm_trials, lm_seed, threads);
        csv << format_number(eps) << ',' << r.trials << ',' << r.violations << ','
            << format_number(r.violation_rate) << ',' << format_number(r.beta) << ','
            << format_number(r.bound) << ',' << format_number(r.max_observed) << '\n';
        rows.push_back({{"epsilon", eps},
                        {"trials", r.trials},
                        {"violations", r.violations},
                        {"violation_rate", r.violation_rate},
                        {"beta", r.beta},
                        {"bound", r.bound},
                        {"max_observed", r.max_observed}});
        summary << " eps=" << format_number(eps) << ":rate=" << format_number(r.violation_rate);
      }
      nlohmann::ordered_json doc{{"sensing", lm_sensing}, {"sparsity", lm_sparsity},
                                 {"modulation", lm_mod},   {"n", lm_n},
                                 {"seed", lm_seed},        {"rows", rows}};
      write_artifact(lm_common, wants_json(lm_common) ? doc.dump(2) + "\n" : csv.str());
      out << "lemma1-check:" << summary.str() << where(lm_common) << "\n";
      return kOk;
    }

    if (ptc->parsed()) {
      pt.sensing_kind = parse_enum(parse_transform_kind, pt_sensing);
      pt.sparsity_kind = parse_enum(parse_transform_kind, pt_sparsity);
      pt.modulation_kind = parse_enum(parse_modulation_kind, pt_mod);
      if (pt.modulation_kind == ModulationKind::chirp)
        throw ConfigError("phase-transition takes digital modulations; use recovery-curve for chirp");
      pt.index_law = parse_enum(parse_index_law, pt_law);
      pt.snr_db = pt_snr;
      const auto report = phase_transition(pt, execution(pt_common));
      write_artifact(pt_common, wants_json(pt_common)
                                    ? to_json(report, pt_common.timing).dump(2) + "\n"
                                    : to_csv(report));
      out << "phase-transition: " << report.cells.size() << " cells x " << pt.trials
          << " trials in " << format_number(report.runtime_seconds) << " s" << where(pt_common)
          << "\n";
      return kOk;
    }

    if (rcc->parsed()) {
      rc.sparsity_kind = parse_enum(parse_transform_kind, rc_sparsity);
      rc.index_law = parse_enum(parse_index_law, rc_law);
      const auto report = recovery_curve(rc, execution(rc_common));
      write_artifact(rc_common, wants_json(rc_common)
                                    ? to_json(report, rc_common.timing).dump(2) + "\n"
                                    : to_csv(report));
      out << "recovery-curve: " << report.cells.size() << " cells x " << rc.trials
          << " trials in " << format_number(report.runtime_seconds) << " s" << where(rc_common)
          << "\n";
      return kOk;
    }

    if (rec->parsed()) {
      re.sensing_kind = parse_enum(parse_transform_kind, re_sensing);
      re.sparsity_kind = parse_enum(parse_transform_kind, re_sparsity);
      re.modulation = {parse_enum(parse_modulation_kind, re_mod), re_wbar};
      re.index_law = parse_enum(parse_index_law, re_law);
      try {
        validate(re);
      } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
      }
      const auto exec = execution(re_common);
      const auto r = reconstruct(re, re.seed, exec.trial);
      nlohmann::ordered_json alpha = nlohmann::ordered_json::array();
      for (const auto &v : r.solver.alpha_star) alpha.push_back({v.real(), v.imag()});
      nlohmann::ordered_json doc{
          {"config",
           {{"n", re.n}, {"s", re.s}, {"m", re.m}, {"sensing", re_sensing},
            {"sparsity", re_sparsity}, {"modulation", re_mod}, {"w_bar", re_wbar},
            {"index_law", re_law},
            {"snr_db", re.snr_db ? nlohmann::ordered_json(*re.snr_db) : nullptr},
            {"seed", re.seed}}},
          {"rel_error", r.trial.rel_error},
          {"recovered", r.trial.recovered},
          {"iterations", r.solver.iterations},
          {"converged", r.solver.converged},
          {"residual_norm", r.solver.residual_norm},
          {"objective", r.solver.objective},
          {"eta", r.trial.eta},
          {"alpha_star", alpha}};
      if (!re_common.output.empty()) {
        if (wants_json(re_common)) {
          write_artifact(re_common, doc.dump(2) + "\n");
        } else {
          std::ostringstream csv;
          csv << "index,re,im\n";
          for (Eigen::Index k = 0; k < r.solver.alpha_star.size(); ++k)
            csv << k << ',' << format_number(r.solver.alpha_star[k].real()) << ','
                << format_number(r.solver.alpha_star[k].imag()) << '\n';
          write_artifact(re_common, csv.str());
        }
      }
      out << "reconstruct: rel_error=" << format_number(r.trial.rel_error)
          << " recovered=" << (r.trial.recovered ? "true" : "false")
          << " iterations=" << r.solver.iterations << where(re_common) << "\n";
      return kOk;
    }
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kInvalidConfig;
}

}  // namespace spreadspec::cli
