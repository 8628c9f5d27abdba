// SPDX-License-Identifier: Apache-2.0
//
// oedkit - configuration-driven optimal experimental design runs.
//
// Subcommands: linear-oed, greedy, nonlinear-oed, verify, export-field.
// Exit codes: 0 ok, 1 validation error, 2 runtime failure.
#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "oed/config.hpp"
#include "oed/parallel.hpp"
#include "oed/runner.hpp"
#include "oed/verify.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string output_dir;
  std::int64_t seed = -1;
  int threads = 0;
  bool dry_run = false;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("-c,--config", args->config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("-o,--output", args->output_dir,
                  "output directory (overrides config)");
  cmd->add_option("--seed", args->seed, "root seed (overrides config)");
  cmd->add_option("--threads", args->threads, "cap on worker threads");
  cmd->add_flag("--dry-run", args->dry_run,
                "validate and echo the config, write nothing");
}

/// Flags take precedence over config keys.
oed::config::ExperimentConfig load(const CommonArgs& args) {
  auto config = oed::config::ExperimentConfig::from_file(args.config_path);
  if (!args.output_dir.empty()) config.override_output_dir(args.output_dir);
  if (args.seed >= 0) {
    config.override_root_seed(static_cast<std::uint64_t>(args.seed));
  }
  if (args.threads > 0) oed::par::set_max_threads(args.threads);
  return config;
}

int report_outcome(const oed::runner::RunOutcome& outcome) {
  if (!outcome.message.empty()) {
    (outcome.exit_code == oed::runner::kExitOk ? std::cout : std::cerr)
        << outcome.message << "\n";
  }
  if (outcome.exit_code == oed::runner::kExitOk && !outcome.report.is_null() &&
      outcome.report.contains("results")) {
    std::cout << "report written; key results:\n"
              << outcome.report["results"].dump(2) << "\n";
  }
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal experimental design toolkit for Bayesian inverse problems"};
  app.require_subcommand(1);

  CommonArgs linear_args, greedy_args, nonlinear_args, export_args;
  std::int64_t greedy_k = -1, nonlinear_k = -1;
  std::string export_what = "prior-sample";
  std::string export_out;

  CLI::App* linear = app.add_subcommand(
      "linear-oed", "relaxed weight optimization with sparsification");
  add_common(linear, &linear_args);

  CLI::App* greedy =
      app.add_subcommand("greedy", "greedy sensor placement (Phi(w + e_j) argmin)");
  add_common(greedy, &greedy_args);
  greedy->add_option("-k,--k", greedy_k, "sensor budget (overrides design.k)");

  CLI::App* nonlinear = app.add_subcommand(
      "nonlinear-oed", "observation-time selection for the SEIRD problem");
  add_common(nonlinear, &nonlinear_args);
  nonlinear->add_option("-k,--k", nonlinear_k,
                        "time budget (overrides design.k)");

  CLI::App* verify =
      app.add_subcommand("verify", "run the oracle-equivalence suite");

  CLI::App* export_field = app.add_subcommand(
      "export-field", "export a field or trajectory as CSV for plotting");
  add_common(export_field, &export_args);
  export_field->add_option(
      "--what", export_what,
      "prior-sample | prior-variance | posterior-variance | forward-final | "
      "seird-trajectory");
  export_field->add_option("--out", export_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) {
      const int failures = oed::verify::run_and_report(std::cout);
      if (failures > 0) {
        std::cerr << failures << " check(s) failed\n";
        return oed::runner::kExitRuntime;
      }
      std::cout << "all checks passed\n";
      return oed::runner::kExitOk;
    }
    if (*linear) {
      return report_outcome(oed::runner::cmd_linear_oed(load(linear_args),
                                                        linear_args.dry_run));
    }
    if (*greedy) {
      std::optional<oed::Index> k;
      if (greedy_k >= 0) k = greedy_k;
      return report_outcome(
          oed::runner::cmd_greedy(load(greedy_args), k, greedy_args.dry_run));
    }
    if (*nonlinear) {
      std::optional<oed::Index> k;
      if (nonlinear_k >= 0) k = nonlinear_k;
      return report_outcome(oed::runner::cmd_nonlinear_oed(
          load(nonlinear_args), k, nonlinear_args.dry_run));
    }
    if (*export_field) {
      return report_outcome(oed::runner::cmd_export_field(
          load(export_args), export_what, export_out));
    }
  } catch (const oed::ConfigError& error) {
    std::cerr << "configuration error: " << error.what() << "\n";
    return oed::runner::kExitValidation;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return oed::runner::kExitRuntime;
  }
  return oed::runner::kExitValidation;
}
