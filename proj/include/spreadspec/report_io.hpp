#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "spreadspec/coherence.hpp"
#include "spreadspec/experiments.hpp"

namespace spreadspec {

/// One row per cell: s,m,w_bar,trials,successes,probability.
std::string to_csv(const ExperimentReport &report);

/// Config, digest, axes, cells (with base seeds) and skipped cells.
/// runtime_seconds is only emitted when include_runtime is set, so that
/// repeated runs produce byte-identical files by default.
nlohmann::ordered_json to_json(const ExperimentReport &report, bool include_runtime = false);

struct CoherenceRow {
  TransformKind sparsity;
  double w_bar;
  CoherenceReport report;
};

/// Columns: sparsity,w_bar,N,N_w,mu_w,product.
std::string coherence_table_csv(const std::vector<CoherenceRow> &rows);
nlohmann::ordered_json coherence_table_json(const std::vector<CoherenceRow> &rows);

/// Fixed-format number rendering shared by every CSV writer.
std::string format_number(double v);

}  // namespace spreadspec
