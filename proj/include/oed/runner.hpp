// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "oed/config.hpp"

namespace oed::runner {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

struct RunOutcome {
  int exit_code = kExitOk;
  config::Json report;
  std::string message;
};

/// Relaxed-design optimization pipeline with optional thresholding; writes
/// report.json, the design CSV, and the MAP/variance field CSVs into the
/// configured output directory.
RunOutcome cmd_linear_oed(const config::ExperimentConfig& config,
                          bool dry_run = false);

/// Greedy selection on a linear problem; per-step criterion values recorded.
RunOutcome cmd_greedy(const config::ExperimentConfig& config,
                      std::optional<Index> k_override = std::nullopt,
                      bool dry_run = false);

/// Observation-time selection for the SEIRD problem (greedy or reweighted-l1
/// over candidate times, sample-average objectives).
RunOutcome cmd_nonlinear_oed(const config::ExperimentConfig& config,
                             std::optional<Index> k_override = std::nullopt,
                             bool dry_run = false);

/// Field exports for plotting: prior samples, prior/posterior variance,
/// forward snapshots, SEIRD trajectories.
RunOutcome cmd_export_field(const config::ExperimentConfig& config,
                            const std::string& what, const std::string& out_file);

/// Strips volatile keys (timing) for determinism comparisons.
config::Json stable_report(config::Json report);

}  // namespace oed::runner
