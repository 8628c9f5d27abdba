// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oed/criteria.hpp"

namespace oed {

/// Sparsity-promoting penalty P(w) added to the criterion.
struct PenaltyConfig {
  enum class Kind { L1, ReweightedL1 };

  Kind kind = Kind::L1;
  double gamma = 0.0;          // penalty weight >= 0
  double epsilon = 1e-3;       // reweighting regularizer > 0
  double epsilon_decay = 0.5;  // geometric decay per outer iteration
  int max_outer = 10;          // reweighting outer-iteration cap

  void validate() const {
    require(gamma >= 0.0, "PenaltyConfig: gamma must be >= 0");
    require(epsilon > 0.0, "PenaltyConfig: epsilon must be > 0");
    require(epsilon_decay > 0.0 && epsilon_decay <= 1.0,
            "PenaltyConfig: epsilon_decay must lie in (0, 1]");
    require(max_outer >= 1, "PenaltyConfig: max_outer must be >= 1");
  }
};

struct OptimizerOptions {
  double gradient_map_tol = 1e-6;
  int max_iterations = 500;
  double armijo_c = 1e-4;  // sufficient-decrease constant, halving steps
  double initial_step = 1.0;
  double step_growth = 2.0;
  int max_backtracks = 50;
  double binary_tol = 0.01;  // reweighting stops once weights are this binary
};

/// Trace of one (re)weighted subproblem.
struct OuterTrace {
  double epsilon = 0.0;
  Vector reweight;                 // diagonal of D_j
  std::vector<double> objective;   // accepted-step penalized objectives
  int iterations = 0;
  bool converged = false;
};

struct OptimizerReport {
  DesignVector w_relaxed;
  DesignVector w_binary;  // populated when a budget was given
  bool has_binary = false;
  std::vector<OuterTrace> outer;
  std::vector<Index> active_set;
  double phi_relaxed = 0.0;  // criterion value, penalty excluded
  double phi_binary = 0.0;
  double gamma_used = 0.0;
  int total_inner_iterations = 0;
  bool converged = false;
  bool aborted = false;
  std::string abort_reason;
};

using DesignObjective = std::function<double(const Vector&)>;
using DesignGradient = std::function<Vector(const Vector&)>;

/// Penalized relaxed design problem min_{w in [0,1]^{n_s}} phi(w) + gamma P(w)
/// solved by projected gradient descent with Armijo backtracking; the
/// reweighted-l1 penalty runs the outer loop over weighting matrices
/// D_j = diag(1 / (|w^{(j-1)}_i| + eps_j)). When a sensor budget is given,
/// gamma is swept by bisection until about `budget` significant weights
/// remain, then the result is thresholded to exactly `budget` sensors.
OptimizerReport minimize_penalized(const DesignObjective& phi,
                                   const DesignGradient& grad, Index n_s,
                                   const PenaltyConfig& penalty,
                                   const Vector& w0,
                                   std::optional<Index> budget = std::nullopt,
                                   const OptimizerOptions& options = {});

/// Spec'd wrapper around minimize_penalized for a linear problem.
OptimizerReport optimize_weights(const BayesianLinearProblem& problem,
                                 const CriterionSpec& spec,
                                 const EstimatorConfig& estimator,
                                 const PenaltyConfig& penalty, const Vector& w0,
                                 std::optional<Index> budget = std::nullopt,
                                 const OptimizerOptions& options = {});

/// Keeps the K largest weights at one and zeroes the rest; ties break toward
/// the lowest index.
DesignVector threshold(const DesignVector& w, Index k);

struct GreedyStep {
  Index chosen = 0;
  double phi = 0.0;
};

struct GreedyResult {
  DesignVector w;
  std::vector<GreedyStep> steps;
};

/// Greedy sensor placement: K passes, each fixing the candidate whose
/// activation minimizes the objective; ties break toward the lowest index.
/// Candidate evaluations run concurrently.
GreedyResult greedy_minimize(const DesignObjective& phi, Index n_s, Index k);

GreedyResult greedy_placement(const BayesianLinearProblem& problem,
                              const CriterionSpec& spec,
                              const EstimatorConfig& estimator, Index k);

struct ExhaustiveResult {
  DesignVector w;
  double phi = 0.0;
  std::size_t evaluated = 0;
};

/// Evaluates the objective on every K-subset (guarded combinatorial count)
/// and returns the minimizer; ties break toward the lexicographically
/// smallest subset.
ExhaustiveResult exhaustive_minimize(const DesignObjective& phi, Index n_s,
                                     Index k,
                                     std::size_t guard = 1000000);

ExhaustiveResult exhaustive_search(const BayesianLinearProblem& problem,
                                   const CriterionSpec& spec,
                                   const EstimatorConfig& estimator, Index k,
                                   std::size_t guard = 1000000);

}  // namespace oed
