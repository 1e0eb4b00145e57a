#include "spreadspec/report_io.hpp"

#include <cstdio>
#include <sstream>

namespace spreadspec {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string to_csv(const ExperimentReport &report) {
  std::ostringstream out;
  out << "s,m,w_bar,trials,successes,probability\n";
  for (const auto &c : report.cells)
    out << c.s << ',' << c.m << ',' << format_number(c.w_bar) << ',' << c.trials << ','
        << c.successes << ',' << format_number(c.probability) << '\n';
  return out.str();
}

namespace {

nlohmann::ordered_json cell_json(const ExperimentCell &c, bool with_counts) {
  nlohmann::ordered_json j{{"s", c.s}, {"m", c.m}, {"w_bar", c.w_bar}};
  if (with_counts) {
    j["trials"] = c.trials;
    j["successes"] = c.successes;
    j["probability"] = c.probability;
  }
  j["base_seed"] = c.base_seed;
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const ExperimentReport &report, bool include_runtime) {
  nlohmann::ordered_json j;
  j["experiment"] = report.experiment;
  j["config"] = report.config;
  j["config_digest"] = report.config_digest;
  j["axes"] = {{"s", report.s_axis}, {"m", report.m_axis}, {"w_bar", report.w_bar_axis}};
  auto cells = nlohmann::ordered_json::array();
  for (const auto &c : report.cells) cells.push_back(cell_json(c, true));
  j["cells"] = std::move(cells);
  auto skipped = nlohmann::ordered_json::array();
  for (const auto &c : report.skipped) skipped.push_back(cell_json(c, false));
  j["skipped"] = std::move(skipped);
  if (include_runtime) j["runtime_seconds"] = report.runtime_seconds;
  return j;
}

std::string coherence_table_csv(const std::vector<CoherenceRow> &rows) {
  std::ostringstream out;
  out << "sparsity,w_bar,N,N_w,mu_w,product\n";
  for (const auto &r : rows)
    out << to_string(r.sparsity) << ',' << format_number(r.w_bar) << ',' << r.report.n_signal
        << ',' << r.report.n_upsampled << ',' << format_number(r.report.mu) << ','
        << format_number(r.report.product_nw_mu2) << '\n';
  return out.str();
}

nlohmann::ordered_json coherence_table_json(const std::vector<CoherenceRow> &rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto &r : rows)
    arr.push_back({{"sparsity", to_string(r.sparsity)},
                   {"w_bar", r.w_bar},
                   {"N", r.report.n_signal},
                   {"N_w", r.report.n_upsampled},
                   {"mu_w", r.report.mu},
                   {"product", r.report.product_nw_mu2},
                   {"beta", r.report.beta},
                   {"argmax_pair", {r.report.argmax_pair.first, r.report.argmax_pair.second}}});
  return {{"rows", arr}};
}

}  // namespace spreadspec
