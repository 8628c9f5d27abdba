// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>
#include <memory>
#include <optional>
#include <string>

#include "oed/design.hpp"
#include "oed/models/advection_diffusion.hpp"
#include "oed/nonlinear/problem.hpp"

namespace oed::config {

using Json = nlohmann::json;

/// Fully materialized linear experiment: the problem plus the pieces the
/// exporters need.
struct LinearSetup {
  std::shared_ptr<BayesianLinearProblem> problem;
  std::shared_ptr<const models::AdvectionDiffusionModel> model;  // null for toys
  std::vector<models::Point2> sensor_coords;
  Index grid_nx = 0;
  Index grid_ny = 0;
};

struct SeirdSetup {
  std::shared_ptr<nonlinear::NonlinearProblem> problem;
  std::shared_ptr<const nonlinear::SeirdLogForwardMap> forward;
  Vector candidate_times;
};

/// Schema-validated experiment configuration. Unknown keys are rejected;
/// every default is materialized into the echoed document so each run is
/// self-describing.
class ExperimentConfig {
public:
  /// Parses and validates. Throws ConfigError on schema violations.
  static ExperimentConfig from_json(const Json& document);
  static ExperimentConfig from_file(const std::string& path);

  /// Resolved configuration with all defaults filled in.
  const Json& echo() const { return echo_; }

  const std::string& problem_kind() const { return problem_kind_; }
  std::uint64_t root_seed() const { return root_seed_; }
  const std::string& output_dir() const { return output_dir_; }
  void override_output_dir(const std::string& dir);
  void override_root_seed(std::uint64_t seed);
  void override_budget(Index k);

  double noise_sigma() const { return noise_sigma_; }
  CriterionSpec criterion(const LinearSetup& setup) const;
  EstimatorConfig estimator() const;
  PenaltyConfig penalty() const;
  OptimizerOptions optimizer() const;
  std::optional<Index> budget() const { return budget_; }
  Index sample_count() const { return n_d_; }
  const std::string& nonlinear_objective() const { return nonlinear_objective_; }

  /// Instantiates the configured linear problem (advection_diffusion or
  /// toy_diag kinds).
  LinearSetup build_linear() const;

  /// Instantiates the configured SEIRD observation-time problem.
  SeirdSetup build_seird() const;

private:
  Json echo_;
  Json problem_block_;
  Json prior_block_;
  Json design_block_;
  std::string problem_kind_;
  std::string nonlinear_objective_;
  std::uint64_t root_seed_ = 0;
  std::string output_dir_;
  double noise_sigma_ = 0.1;
  std::optional<Index> budget_;
  Index n_d_ = 20;
};

}  // namespace oed::config
