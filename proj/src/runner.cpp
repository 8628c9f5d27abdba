// SPDX-License-Identifier: Apache-2.0
#include "oed/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "oed/io.hpp"
#include "oed/random.hpp"

namespace oed::runner {

namespace {

using config::ExperimentConfig;
using config::Json;
using config::LinearSetup;
using config::SeirdSetup;

Json to_json(const Vector& values) {
  Json array = Json::array();
  for (Index i = 0; i < values.size(); ++i) array.push_back(values[i]);
  return array;
}

Json to_json(const std::vector<Index>& values) {
  Json array = Json::array();
  for (Index i : values) array.push_back(i);
  return array;
}

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}

  Json timing() const {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    const auto now = std::chrono::system_clock::now();
    const std::time_t stamp = std::chrono::system_clock::to_time_t(now);
    std::ostringstream text;
    text << std::put_time(std::gmtime(&stamp), "%FT%TZ");
    Json timing;
    timing["wall_seconds"] =
        std::chrono::duration<double>(elapsed).count();
    timing["timestamp"] = text.str();
    return timing;
  }

private:
  std::chrono::steady_clock::time_point start_;
};

void write_report(const ExperimentConfig& config, const Json& report) {
  const std::filesystem::path dir(config.output_dir());
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "report.json");
  if (!out) {
    throw std::runtime_error("runner: cannot write report to " + dir.string());
  }
  out << report.dump(2) << "\n";
}

Json base_report(const std::string& command, const ExperimentConfig& config) {
  Json report;
  report["command"] = command;
  report["config"] = config.echo();
  report["seeds"] = Json{{"root", config.root_seed()},
                         {"substreams", Json::array({"truth-sample",
                                                     "data-noise", "estimator",
                                                     "prior-samples", "noise"})}};
  return report;
}

/// Posterior pointwise-variance field through the SMW applies on coordinate
/// directions. Dense-oracle grade, flagged expensive for large grids.
Vector posterior_variance_diagonal(const LinearGaussianPosterior& post) {
  const Index n = post.problem().n_param();
  Vector diagonal(n);
  Vector basis = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    basis[i] = 1.0;
    diagonal[i] = post.apply_post_cov_smw(basis)[i];
    basis[i] = 0.0;
  }
  return diagonal;
}

/// Synthetic-inversion exports: draws a truth from the prior, simulates data
/// at the final design, and writes the MAP and variance fields.
void export_linear_fields(const ExperimentConfig& config,
                          const LinearSetup& setup, const DesignVector& w,
                          Json* report) {
  if (!setup.model) return;  // toy problems have no grid fields
  const std::filesystem::path dir(config.output_dir());
  const auto& problem = *setup.problem;

  const Vector truth =
      problem.prior().sample(rng::substream(config.root_seed(), "truth-sample"));
  rng::Engine noise(rng::substream(config.root_seed(), "data-noise"));
  const Vector data = problem.forward().apply(truth) +
                      problem.sigma() *
                          rng::standard_normal(problem.n_sensors(), noise);

  LinearGaussianPosterior post(setup.problem, w);
  const Vector map = post.map_point(data);
  const Vector variance = posterior_variance_diagonal(post);

  io::write_field_csv(dir / "truth_field.csv", truth, setup.grid_nx,
                      setup.grid_ny);
  io::write_field_csv(dir / "map_field.csv", map, setup.grid_nx, setup.grid_ny);
  io::write_field_csv(dir / "posterior_variance.csv", variance, setup.grid_nx,
                      setup.grid_ny);
  (*report)["artifacts"].push_back("truth_field.csv");
  (*report)["artifacts"].push_back("map_field.csv");
  (*report)["artifacts"].push_back("posterior_variance.csv");
  (*report)["results"]["map_error_m_norm"] =
      m_norm(map - truth, problem.mass());
}

RunOutcome finish(const ExperimentConfig& config, Json report,
                  const Stopwatch& watch, int exit_code,
                  const std::string& message = "") {
  report["timing"] = watch.timing();
  write_report(config, report);
  return {exit_code, std::move(report), message};
}

RunOutcome classify_error(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error) ||
      dynamic_cast<const std::invalid_argument*>(&error)) {
    return {kExitValidation, {}, error.what()};
  }
  return {kExitRuntime, {}, error.what()};
}

}  // namespace

Json stable_report(Json report) {
  report.erase("timing");
  return report;
}

RunOutcome cmd_linear_oed(const ExperimentConfig& config, bool dry_run) {
  Stopwatch watch;
  try {
    Json report = base_report("linear-oed", config);
    if (dry_run) {
      report["dry_run"] = true;
      return {kExitOk, report, "dry run: configuration is valid"};
    }

    const LinearSetup setup = config.build_linear();
    const auto& problem = *setup.problem;
    const CriterionSpec spec = config.criterion(setup);
    const EstimatorConfig estimator = config.estimator();
    const PenaltyConfig penalty = config.penalty();
    const OptimizerOptions optimizer = config.optimizer();
    const Index n_s = problem.n_sensors();

    Json results;
    results["phi_empty"] =
        evaluate_criterion(problem, DesignVector::zeros(n_s), spec, estimator);
    results["phi_full"] =
        evaluate_criterion(problem, DesignVector::ones(n_s), spec, estimator);

    // Budget semantics: with a positive penalty weight the run keeps the
    // configured gamma and thresholds afterwards; with gamma = 0 the budget
    // drives the bisection sweep.
    const std::optional<Index> bisect_budget =
        (config.budget() && penalty.gamma == 0.0) ? config.budget()
                                                  : std::nullopt;
    OptimizerReport opt = optimize_weights(problem, spec, estimator, penalty,
                                           Vector::Constant(n_s, 0.5),
                                           bisect_budget, optimizer);
    if (opt.aborted) {
      report["results"] = results;
      report["partial"] = true;
      report["error"] = opt.abort_reason;
      return finish(config, std::move(report), watch, kExitRuntime,
                    "criterion evaluation failed: " + opt.abort_reason);
    }

    DesignVector final_design = opt.w_relaxed;
    if (config.budget() && !opt.has_binary) {
      opt.w_binary = threshold(opt.w_relaxed, *config.budget());
      opt.has_binary = true;
      opt.phi_binary = evaluate_criterion(problem, opt.w_binary, spec, estimator);
    }
    if (opt.has_binary) final_design = opt.w_binary;

    results["phi_relaxed"] = opt.phi_relaxed;
    results["w_relaxed"] = to_json(opt.w_relaxed.weights());
    results["gamma_used"] = opt.gamma_used;
    results["converged"] = opt.converged;
    results["inner_iterations"] = opt.total_inner_iterations;
    if (opt.has_binary) {
      results["phi_binary"] = opt.phi_binary;
      results["w_binary"] = to_json(opt.w_binary.weights());
      results["relaxed_binary_gap"] = opt.phi_binary - opt.phi_relaxed;
    }
    results["active_set"] = to_json(final_design.active_set(0.5));
    Json traces = Json::array();
    for (const OuterTrace& trace : opt.outer) {
      Json entry;
      entry["epsilon"] = trace.epsilon;
      entry["iterations"] = trace.iterations;
      entry["converged"] = trace.converged;
      entry["objective"] = trace.objective;
      traces.push_back(entry);
    }
    results["outer_traces"] = traces;

    EstimatorDiagnostics diagnostics;
    if (spec.kind == CriterionSpec::Kind::A) {
      phi_A(problem, final_design, estimator, &diagnostics);
    } else if (spec.kind == CriterionSpec::Kind::D) {
      phi_D(problem, final_design, estimator, &diagnostics);
    } else {
      diagnostics.route = "exact";
      diagnostics.value = phi_c(problem, final_design, spec.c_vector);
    }
    Json diag;
    diag["route"] = diagnostics.route;
    diag["value"] = diagnostics.value;
    if (diagnostics.mc_samples > 0) {
      diag["mc_standard_error"] = diagnostics.mc_standard_error;
      diag["mc_samples"] = diagnostics.mc_samples;
    }
    if (diagnostics.sketch_eigenvalues.size() > 0) {
      diag["sketch_eigenvalues"] = to_json(diagnostics.sketch_eigenvalues);
      diag["sketch_rank"] = diagnostics.sketch_rank;
    }
    results["estimator_diagnostics"] = diag;

    report["results"] = results;
    report["artifacts"] = Json::array({"report.json", "design.csv"});

    const std::filesystem::path dir(config.output_dir());
    io::write_design_csv(dir / "design.csv", setup.sensor_coords,
                         final_design.weights());
    export_linear_fields(config, setup, final_design, &report);

    return finish(config, std::move(report), watch, kExitOk);
  } catch (const std::exception& error) {
    return classify_error(error);
  }
}

RunOutcome cmd_greedy(const ExperimentConfig& config,
                      std::optional<Index> k_override, bool dry_run) {
  Stopwatch watch;
  try {
    Json report = base_report("greedy", config);
    if (dry_run) {
      report["dry_run"] = true;
      return {kExitOk, report, "dry run: configuration is valid"};
    }

    const LinearSetup setup = config.build_linear();
    const auto& problem = *setup.problem;
    const CriterionSpec spec = config.criterion(setup);
    const EstimatorConfig estimator = config.estimator();

    std::optional<Index> budget = k_override ? k_override : config.budget();
    if (!budget) {
      throw std::invalid_argument(
          "greedy: a sensor budget is required (design.k or --k)");
    }

    const GreedyResult greedy =
        greedy_placement(problem, spec, estimator, *budget);

    Json results;
    results["phi_empty"] = evaluate_criterion(
        problem, DesignVector::zeros(problem.n_sensors()), spec, estimator);
    Json steps = Json::array();
    for (const GreedyStep& step : greedy.steps) {
      steps.push_back(Json{{"sensor", step.chosen}, {"phi", step.phi}});
    }
    results["steps"] = steps;
    results["w"] = to_json(greedy.w.weights());
    results["active_set"] = to_json(greedy.w.active_set());
    report["results"] = results;
    report["artifacts"] = Json::array({"report.json", "design.csv"});

    io::write_design_csv(std::filesystem::path(config.output_dir()) /
                             "design.csv",
                         setup.sensor_coords, greedy.w.weights());
    return finish(config, std::move(report), watch, kExitOk);
  } catch (const std::exception& error) {
    return classify_error(error);
  }
}

RunOutcome cmd_nonlinear_oed(const ExperimentConfig& config,
                             std::optional<Index> k_override, bool dry_run) {
  Stopwatch watch;
  try {
    Json report = base_report("nonlinear-oed", config);
    if (dry_run) {
      report["dry_run"] = true;
      return {kExitOk, report, "dry run: configuration is valid"};
    }

    const SeirdSetup setup = config.build_seird();
    const auto& problem = *setup.problem;
    const Index n_s = problem.n_candidates();
    const nonlinear::TrainingSet training = nonlinear::TrainingSet::draw(
        problem, config.sample_count(), config.root_seed());
    const std::string objective_kind = config.nonlinear_objective();

    // Common random numbers: the training set stays fixed across designs.
    auto objective = [&](const Vector& w) {
      const DesignVector design(w);
      if (objective_kind == "laplace_a") {
        return nonlinear::psi_A_gaussian(problem, design, training).value;
      }
      if (objective_kind == "laplace_c") {
        return nonlinear::psi_c_gaussian(problem, design, training,
                                         Vector::Ones(problem.n_param()))
            .value;
      }
      return nonlinear::bayes_risk_saa(problem, design, training).value;
    };

    Json results;
    results["objective_kind"] = objective_kind;
    results["n_training"] = training.size();

    std::optional<Index> budget = k_override ? k_override : config.budget();
    const PenaltyConfig penalty = config.penalty();

    DesignVector final_design = DesignVector::zeros(n_s);
    if (budget) {
      const GreedyResult greedy = greedy_minimize(objective, n_s, *budget);
      final_design = greedy.w;
      Json steps = Json::array();
      for (const GreedyStep& step : greedy.steps) {
        steps.push_back(Json{{"time_index", step.chosen},
                             {"time", setup.candidate_times[step.chosen]},
                             {"objective", step.phi}});
      }
      results["method"] = "greedy";
      results["steps"] = steps;
    } else {
      if (objective_kind != "bayes_risk") {
        throw std::invalid_argument(
            "nonlinear-oed: the relaxed reweighted path requires the "
            "bayes_risk objective (gradients are wired for it only)");
      }
      if (penalty.gamma <= 0.0) {
        throw std::invalid_argument(
            "nonlinear-oed: provide design.k for greedy selection or a "
            "positive design.penalty.gamma for the relaxed run");
      }
      auto gradient = [&](const Vector& w) {
        return nonlinear::grad_bayes_risk_saa(problem, DesignVector(w),
                                              training);
      };
      const OptimizerReport opt = minimize_penalized(
          objective, gradient, n_s, penalty, Vector::Constant(n_s, 0.5),
          std::nullopt, config.optimizer());
      if (opt.aborted) {
        report["results"] = results;
        report["partial"] = true;
        report["error"] = opt.abort_reason;
        return finish(config, std::move(report), watch, kExitRuntime,
                      opt.abort_reason);
      }
      final_design = opt.w_relaxed;
      results["method"] = "reweighted_l1";
      results["gamma_used"] = opt.gamma_used;
      results["w_relaxed"] = to_json(opt.w_relaxed.weights());
    }

    const auto risk =
        nonlinear::bayes_risk_saa(problem, final_design, training);
    results["risk"] = risk.value;
    results["risk_standard_error"] = risk.standard_error;
    results["risk_failed_samples"] = risk.n_failed;
    results["w"] = to_json(final_design.weights());
    results["selected_times"] = [&] {
      Json times = Json::array();
      for (Index i : final_design.active_set(0.5)) {
        times.push_back(setup.candidate_times[i]);
      }
      return times;
    }();
    report["results"] = results;
    report["artifacts"] =
        Json::array({"report.json", "time_design.csv", "trajectory.csv"});

    const std::filesystem::path dir(config.output_dir());
    io::write_time_design_csv(dir / "time_design.csv", setup.candidate_times,
                              final_design.weights());
    const nonlinear::SeirdRawParams nominal = nonlinear::SeirdLogForwardMap::to_raw(
        setup.forward->model(), problem.prior().mean());
    io::write_matrix_csv(dir / "trajectory.csv",
                         setup.forward->model().trajectory(nominal),
                         {"t", "S", "E", "I", "R", "D"});
    return finish(config, std::move(report), watch, kExitOk);
  } catch (const std::exception& error) {
    return classify_error(error);
  }
}

RunOutcome cmd_export_field(const ExperimentConfig& config,
                            const std::string& what,
                            const std::string& out_file) {
  try {
    const std::filesystem::path out =
        out_file.empty()
            ? std::filesystem::path(config.output_dir()) / (what + ".csv")
            : std::filesystem::path(out_file);

    if (config.problem_kind() == "seird") {
      if (what != "seird-trajectory") {
        throw std::invalid_argument(
            "export-field: seird problems support --what seird-trajectory");
      }
      const SeirdSetup setup = config.build_seird();
      const nonlinear::SeirdRawParams nominal =
          nonlinear::SeirdLogForwardMap::to_raw(setup.forward->model(),
                                                setup.problem->prior().mean());
      io::write_matrix_csv(out, setup.forward->model().trajectory(nominal),
                           {"t", "S", "E", "I", "R", "D"});
      return {kExitOk, {}, "wrote " + out.string()};
    }

    const LinearSetup setup = config.build_linear();
    require(setup.model != nullptr,
            "export-field: grid exports need an advection_diffusion problem");
    const auto& problem = *setup.problem;
    const Index n = problem.n_param();

    Vector field;
    if (what == "prior-sample") {
      field = problem.prior().sample(
          rng::substream(config.root_seed(), "export-sample"));
    } else if (what == "prior-variance") {
      field.resize(n);
      Vector basis = Vector::Zero(n);
      for (Index i = 0; i < n; ++i) {
        basis[i] = 1.0;
        field[i] = problem.prior().apply_cov(basis)[i];
        basis[i] = 0.0;
      }
    } else if (what == "posterior-variance") {
      LinearGaussianPosterior post(setup.problem,
                                   DesignVector::ones(problem.n_sensors()));
      field = posterior_variance_diagonal(post);
    } else if (what == "forward-final") {
      const Vector sample = problem.prior().sample(
          rng::substream(config.root_seed(), "export-sample"));
      field = setup.model->solve_forward(sample);
    } else {
      throw std::invalid_argument(
          "export-field: --what must be one of prior-sample, prior-variance, "
          "posterior-variance, forward-final, seird-trajectory");
    }

    io::write_field_csv(out, field, setup.grid_nx, setup.grid_ny);
    return {kExitOk, {}, "wrote " + out.string()};
  } catch (const std::exception& error) {
    return classify_error(error);
  }
}

}  // namespace oed::runner
