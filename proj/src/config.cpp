// SPDX-License-Identifier: Apache-2.0
#include "oed/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "oed/models/toy.hpp"
#include "oed/random.hpp"

namespace oed::config {

namespace {

void check_keys(const Json& object, const std::string& context,
                const std::set<std::string>& allowed) {
  if (!object.is_object()) {
    throw ConfigError("config: '" + context + "' must be an object");
  }
  for (const auto& [key, value] : object.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("config: unknown key '" + key + "' in '" + context +
                        "'");
    }
  }
}

double get_number(const Json& object, const std::string& context,
                  const std::string& key, double fallback) {
  if (!object.contains(key)) return fallback;
  if (!object.at(key).is_number()) {
    throw ConfigError("config: '" + context + "." + key + "' must be a number");
  }
  return object.at(key).get<double>();
}

Index get_index(const Json& object, const std::string& context,
                const std::string& key, Index fallback) {
  if (!object.contains(key)) return fallback;
  if (!object.at(key).is_number_integer()) {
    throw ConfigError("config: '" + context + "." + key +
                      "' must be an integer");
  }
  return object.at(key).get<Index>();
}

std::string get_string(const Json& object, const std::string& context,
                       const std::string& key, const std::string& fallback) {
  if (!object.contains(key)) return fallback;
  if (!object.at(key).is_string()) {
    throw ConfigError("config: '" + context + "." + key + "' must be a string");
  }
  return object.at(key).get<std::string>();
}

Vector get_vector(const Json& array, const std::string& context) {
  if (!array.is_array() || array.empty()) {
    throw ConfigError("config: '" + context + "' must be a non-empty array");
  }
  Vector values(static_cast<Index>(array.size()));
  Index i = 0;
  for (const auto& entry : array) {
    if (!entry.is_number()) {
      throw ConfigError("config: '" + context + "' must contain numbers");
    }
    values[i++] = entry.get<double>();
  }
  return values;
}

std::string expect_one_of(const std::string& value, const std::string& context,
                          const std::set<std::string>& allowed) {
  if (!allowed.count(value)) {
    std::string options;
    for (const auto& option : allowed) {
      options += (options.empty() ? "" : ", ") + option;
    }
    throw ConfigError("config: '" + context + "' must be one of {" + options +
                      "}, got '" + value + "'");
  }
  return value;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  Json document;
  try {
    document = Json::parse(in);
  } catch (const Json::parse_error& error) {
    throw ConfigError(std::string("config: JSON parse error: ") + error.what());
  }
  return from_json(document);
}

ExperimentConfig ExperimentConfig::from_json(const Json& document) {
  check_keys(document, "(root)",
             {"problem", "prior", "noise", "design", "seeds", "output_dir"});
  if (!document.contains("problem")) {
    throw ConfigError("config: missing required block 'problem'");
  }

  ExperimentConfig config;
  Json echo;

  // problem -----------------------------------------------------------------
  const Json& problem = document.at("problem");
  config.problem_kind_ = expect_one_of(
      get_string(problem, "problem", "kind", ""), "problem.kind",
      {"advection_diffusion", "toy_diag", "seird"});
  Json problem_echo;
  problem_echo["kind"] = config.problem_kind_;

  if (config.problem_kind_ == "advection_diffusion") {
    check_keys(problem, "problem",
               {"kind", "nx", "ny", "kappa", "velocity", "t_final", "n_steps",
                "lengths", "sensors"});
    problem_echo["nx"] = get_index(problem, "problem", "nx", 16);
    problem_echo["ny"] = get_index(problem, "problem", "ny", 16);
    problem_echo["kappa"] = get_number(problem, "problem", "kappa", 0.05);
    problem_echo["t_final"] = get_number(problem, "problem", "t_final", 0.2);
    problem_echo["n_steps"] = get_index(problem, "problem", "n_steps", 20);
    Vector velocity(2);
    velocity << 1.0, 0.3;
    if (problem.contains("velocity")) {
      velocity = get_vector(problem.at("velocity"), "problem.velocity");
      if (velocity.size() != 2) {
        throw ConfigError("config: 'problem.velocity' must have 2 entries");
      }
    }
    problem_echo["velocity"] = {velocity[0], velocity[1]};
    Vector lengths(2);
    lengths << 1.0, 1.0;
    if (problem.contains("lengths")) {
      lengths = get_vector(problem.at("lengths"), "problem.lengths");
      if (lengths.size() != 2) {
        throw ConfigError("config: 'problem.lengths' must have 2 entries");
      }
    }
    problem_echo["lengths"] = {lengths[0], lengths[1]};

    Json sensors = problem.contains("sensors") ? problem.at("sensors") : Json::object();
    const std::string mode = expect_one_of(
        get_string(sensors, "problem.sensors", "mode", "lattice"),
        "problem.sensors.mode", {"lattice", "random", "list"});
    Json sensors_echo;
    sensors_echo["mode"] = mode;
    if (mode == "lattice") {
      check_keys(sensors, "problem.sensors", {"mode", "nx", "ny", "margin"});
      sensors_echo["nx"] = get_index(sensors, "problem.sensors", "nx", 5);
      sensors_echo["ny"] = get_index(sensors, "problem.sensors", "ny", 5);
      sensors_echo["margin"] = get_number(sensors, "problem.sensors", "margin", 0.1);
    } else if (mode == "random") {
      check_keys(sensors, "problem.sensors", {"mode", "count", "seed", "margin"});
      sensors_echo["count"] = get_index(sensors, "problem.sensors", "count", 10);
      sensors_echo["seed"] = get_index(sensors, "problem.sensors", "seed", 11);
      sensors_echo["margin"] =
          get_number(sensors, "problem.sensors", "margin", 0.08);
    } else {
      check_keys(sensors, "problem.sensors", {"mode", "points"});
      if (!sensors.contains("points")) {
        throw ConfigError("config: sensor list mode requires 'points'");
      }
      sensors_echo["points"] = sensors.at("points");
    }
    problem_echo["sensors"] = sensors_echo;
  } else if (config.problem_kind_ == "toy_diag") {
    check_keys(problem, "problem", {"kind", "variances"});
    if (!problem.contains("variances")) {
      throw ConfigError("config: toy_diag requires 'problem.variances'");
    }
    problem_echo["variances"] = problem.at("variances");
    get_vector(problem.at("variances"), "problem.variances");
  } else {  // seird
    check_keys(problem, "problem",
               {"kind", "n_pop", "t_end", "n_beta", "rk_steps", "initial",
                "candidate_times", "nominal"});
    problem_echo["n_pop"] = get_number(problem, "problem", "n_pop", 1.0);
    problem_echo["t_end"] = get_number(problem, "problem", "t_end", 100.0);
    problem_echo["n_beta"] = get_index(problem, "problem", "n_beta", 8);
    problem_echo["rk_steps"] = get_index(problem, "problem", "rk_steps", 200);
    Vector initial(5);
    initial << 0.96, 0.02, 0.02, 0.0, 0.0;
    if (problem.contains("initial")) {
      initial = get_vector(problem.at("initial"), "problem.initial");
      if (initial.size() != 5) {
        throw ConfigError("config: 'problem.initial' must have 5 entries");
      }
    }
    problem_echo["initial"] = {initial[0], initial[1], initial[2], initial[3],
                               initial[4]};

    Json times = problem.contains("candidate_times") ? problem.at("candidate_times")
                                                     : Json::object();
    const std::string mode = expect_one_of(
        get_string(times, "problem.candidate_times", "mode", "uniform"),
        "problem.candidate_times.mode", {"uniform", "list"});
    Json times_echo;
    times_echo["mode"] = mode;
    if (mode == "uniform") {
      check_keys(times, "problem.candidate_times", {"mode", "count"});
      times_echo["count"] = get_index(times, "problem.candidate_times", "count", 8);
    } else {
      check_keys(times, "problem.candidate_times", {"mode", "times"});
      if (!times.contains("times")) {
        throw ConfigError("config: candidate time list mode requires 'times'");
      }
      times_echo["times"] = times.at("times");
      get_vector(times.at("times"), "problem.candidate_times.times");
    }
    problem_echo["candidate_times"] = times_echo;

    Json nominal = problem.contains("nominal") ? problem.at("nominal") : Json::object();
    check_keys(nominal, "problem.nominal",
               {"beta", "sigma_e", "gamma_rec", "delta_mort"});
    Json nominal_echo;
    nominal_echo["beta"] = get_number(nominal, "problem.nominal", "beta", 0.35);
    nominal_echo["sigma_e"] =
        get_number(nominal, "problem.nominal", "sigma_e", 0.2);
    nominal_echo["gamma_rec"] =
        get_number(nominal, "problem.nominal", "gamma_rec", 0.1);
    nominal_echo["delta_mort"] =
        get_number(nominal, "problem.nominal", "delta_mort", 0.015);
    problem_echo["nominal"] = nominal_echo;
  }
  echo["problem"] = problem_echo;
  config.problem_block_ = problem_echo;

  // prior ---------------------------------------------------------------------
  Json prior = document.contains("prior") ? document.at("prior") : Json::object();
  Json prior_echo;
  if (config.problem_kind_ == "seird") {
    check_keys(prior, "prior", {"beta_gamma", "beta_delta", "scalar_sigmas"});
    prior_echo["beta_gamma"] = get_number(prior, "prior", "beta_gamma", 8.0);
    prior_echo["beta_delta"] = get_number(prior, "prior", "beta_delta", 0.25);
    Vector scalar_sigmas(3);
    scalar_sigmas << 0.3, 0.3, 0.3;
    if (prior.contains("scalar_sigmas")) {
      scalar_sigmas = get_vector(prior.at("scalar_sigmas"), "prior.scalar_sigmas");
      if (scalar_sigmas.size() != 3) {
        throw ConfigError("config: 'prior.scalar_sigmas' must have 3 entries");
      }
    }
    prior_echo["scalar_sigmas"] = {scalar_sigmas[0], scalar_sigmas[1],
                                   scalar_sigmas[2]};
  } else if (config.problem_kind_ == "advection_diffusion") {
    check_keys(prior, "prior", {"gamma", "delta", "mean"});
    prior_echo["gamma"] = get_number(prior, "prior", "gamma", 0.1);
    prior_echo["delta"] = get_number(prior, "prior", "delta", 1.0);
    prior_echo["mean"] = get_number(prior, "prior", "mean", 0.0);
  } else {
    check_keys(prior, "prior", {});
  }
  echo["prior"] = prior_echo;
  config.prior_block_ = prior_echo;

  // noise ---------------------------------------------------------------------
  Json noise = document.contains("noise") ? document.at("noise") : Json::object();
  check_keys(noise, "noise", {"sigma"});
  config.noise_sigma_ = get_number(noise, "noise", "sigma", 0.1);
  if (config.noise_sigma_ <= 0.0) {
    throw ConfigError("config: 'noise.sigma' must be positive");
  }
  echo["noise"] = Json{{"sigma", config.noise_sigma_}};

  // design --------------------------------------------------------------------
  Json design = document.contains("design") ? document.at("design") : Json::object();
  check_keys(design, "design",
             {"criterion", "c", "estimator", "penalty", "k", "optimizer", "n_d",
              "objective"});
  Json design_echo;
  design_echo["criterion"] = expect_one_of(
      get_string(design, "design", "criterion", "A"), "design.criterion",
      {"A", "C", "D"});

  Json c_block = design.contains("c") ? design.at("c") : Json::object();
  const std::string c_mode =
      expect_one_of(get_string(c_block, "design.c", "mode", "ones"),
                    "design.c.mode", {"ones", "gaussian_bump", "list"});
  Json c_echo;
  c_echo["mode"] = c_mode;
  if (c_mode == "gaussian_bump") {
    check_keys(c_block, "design.c", {"mode", "center", "width"});
    Vector center(2);
    center << 0.5, 0.5;
    if (c_block.contains("center")) {
      center = get_vector(c_block.at("center"), "design.c.center");
      if (center.size() != 2) {
        throw ConfigError("config: 'design.c.center' must have 2 entries");
      }
    }
    c_echo["center"] = {center[0], center[1]};
    c_echo["width"] = get_number(c_block, "design.c", "width", 0.15);
  } else if (c_mode == "list") {
    check_keys(c_block, "design.c", {"mode", "values"});
    if (!c_block.contains("values")) {
      throw ConfigError("config: c list mode requires 'values'");
    }
    c_echo["values"] = c_block.at("values");
  } else {
    check_keys(c_block, "design.c", {"mode"});
  }
  design_echo["c"] = c_echo;

  Json estimator = design.contains("estimator") ? design.at("estimator")
                                                : Json::object();
  check_keys(estimator, "design.estimator",
             {"route", "n_mc", "ell", "q", "r", "probe"});
  Json estimator_echo;
  estimator_echo["route"] = expect_one_of(
      get_string(estimator, "design.estimator", "route", "measurement_space"),
      "design.estimator.route",
      {"exact_dense", "monte_carlo", "subspace_iteration", "measurement_space",
       "adjoint_free"});
  estimator_echo["n_mc"] = get_index(estimator, "design.estimator", "n_mc", 100);
  estimator_echo["ell"] = get_index(estimator, "design.estimator", "ell", 20);
  estimator_echo["q"] = get_index(estimator, "design.estimator", "q", 1);
  estimator_echo["r"] = get_index(estimator, "design.estimator", "r", 20);
  estimator_echo["probe"] = expect_one_of(
      get_string(estimator, "design.estimator", "probe", "rademacher"),
      "design.estimator.probe", {"rademacher", "gaussian"});
  design_echo["estimator"] = estimator_echo;

  Json penalty = design.contains("penalty") ? design.at("penalty") : Json::object();
  check_keys(penalty, "design.penalty",
             {"kind", "gamma", "epsilon", "epsilon_decay", "max_outer"});
  Json penalty_echo;
  penalty_echo["kind"] = expect_one_of(
      get_string(penalty, "design.penalty", "kind", "reweighted_l1"),
      "design.penalty.kind", {"l1", "reweighted_l1"});
  penalty_echo["gamma"] = get_number(penalty, "design.penalty", "gamma", 0.0);
  penalty_echo["epsilon"] =
      get_number(penalty, "design.penalty", "epsilon", 1e-3);
  penalty_echo["epsilon_decay"] =
      get_number(penalty, "design.penalty", "epsilon_decay", 0.5);
  penalty_echo["max_outer"] =
      get_index(penalty, "design.penalty", "max_outer", 10);
  design_echo["penalty"] = penalty_echo;

  if (design.contains("k")) {
    const Index k = get_index(design, "design", "k", 0);
    if (k < 0) throw ConfigError("config: 'design.k' must be nonnegative");
    config.budget_ = k;
    design_echo["k"] = k;
  }

  Json optimizer = design.contains("optimizer") ? design.at("optimizer")
                                                : Json::object();
  check_keys(optimizer, "design.optimizer",
             {"gradient_map_tol", "max_iterations"});
  Json optimizer_echo;
  optimizer_echo["gradient_map_tol"] =
      get_number(optimizer, "design.optimizer", "gradient_map_tol", 1e-6);
  optimizer_echo["max_iterations"] =
      get_index(optimizer, "design.optimizer", "max_iterations", 500);
  design_echo["optimizer"] = optimizer_echo;

  config.n_d_ = get_index(design, "design", "n_d", 20);
  if (config.n_d_ < 1) throw ConfigError("config: 'design.n_d' must be >= 1");
  design_echo["n_d"] = config.n_d_;
  config.nonlinear_objective_ = expect_one_of(
      get_string(design, "design", "objective", "bayes_risk"),
      "design.objective", {"bayes_risk", "laplace_a", "laplace_c"});
  design_echo["objective"] = config.nonlinear_objective_;

  echo["design"] = design_echo;
  config.design_block_ = design_echo;

  // seeds / output --------------------------------------------------------------
  Json seeds = document.contains("seeds") ? document.at("seeds") : Json::object();
  check_keys(seeds, "seeds", {"root"});
  config.root_seed_ =
      static_cast<std::uint64_t>(get_index(seeds, "seeds", "root", 1234));
  echo["seeds"] = Json{{"root", config.root_seed_}};

  if (document.contains("output_dir") && !document.at("output_dir").is_string()) {
    throw ConfigError("config: 'output_dir' must be a string");
  }
  config.output_dir_ = document.contains("output_dir")
                           ? document.at("output_dir").get<std::string>()
                           : std::string("oed_out");
  echo["output_dir"] = config.output_dir_;

  config.echo_ = echo;
  return config;
}

void ExperimentConfig::override_output_dir(const std::string& dir) {
  output_dir_ = dir;
  echo_["output_dir"] = dir;
}

void ExperimentConfig::override_root_seed(std::uint64_t seed) {
  root_seed_ = seed;
  echo_["seeds"]["root"] = seed;
}

void ExperimentConfig::override_budget(Index k) {
  budget_ = k;
  echo_["design"]["k"] = k;
}

EstimatorConfig ExperimentConfig::estimator() const {
  const Json& block = design_block_.at("estimator");
  EstimatorConfig estimator;
  const std::string route = block.at("route").get<std::string>();
  if (route == "exact_dense") estimator.route = EstimatorRoute::ExactDense;
  if (route == "monte_carlo") estimator.route = EstimatorRoute::MonteCarlo;
  if (route == "subspace_iteration") {
    estimator.route = EstimatorRoute::SubspaceIteration;
  }
  if (route == "measurement_space") {
    estimator.route = EstimatorRoute::MeasurementSpace;
  }
  if (route == "adjoint_free") estimator.route = EstimatorRoute::AdjointFree;
  estimator.n_mc = static_cast<int>(block.at("n_mc").get<Index>());
  estimator.ell = block.at("ell").get<Index>();
  estimator.q = static_cast<int>(block.at("q").get<Index>());
  estimator.r = block.at("r").get<Index>();
  estimator.probe = block.at("probe").get<std::string>() == "gaussian"
                        ? ProbeDistribution::Gaussian
                        : ProbeDistribution::Rademacher;
  estimator.seed = rng::substream(root_seed_, "estimator");
  estimator.validate();
  return estimator;
}

PenaltyConfig ExperimentConfig::penalty() const {
  const Json& block = design_block_.at("penalty");
  PenaltyConfig penalty;
  penalty.kind = block.at("kind").get<std::string>() == "l1"
                     ? PenaltyConfig::Kind::L1
                     : PenaltyConfig::Kind::ReweightedL1;
  penalty.gamma = block.at("gamma").get<double>();
  penalty.epsilon = block.at("epsilon").get<double>();
  penalty.epsilon_decay = block.at("epsilon_decay").get<double>();
  penalty.max_outer = static_cast<int>(block.at("max_outer").get<Index>());
  penalty.validate();
  return penalty;
}

OptimizerOptions ExperimentConfig::optimizer() const {
  const Json& block = design_block_.at("optimizer");
  OptimizerOptions options;
  options.gradient_map_tol = block.at("gradient_map_tol").get<double>();
  options.max_iterations =
      static_cast<int>(block.at("max_iterations").get<Index>());
  return options;
}

CriterionSpec ExperimentConfig::criterion(const LinearSetup& setup) const {
  const std::string kind = design_block_.at("criterion").get<std::string>();
  if (kind == "A") return CriterionSpec::a();
  if (kind == "D") return CriterionSpec::d();

  const Json& c_block = design_block_.at("c");
  const std::string mode = c_block.at("mode").get<std::string>();
  const Index n = setup.problem->n_param();
  if (mode == "ones") return CriterionSpec::c(Vector::Ones(n));
  if (mode == "list") {
    Vector values = get_vector(c_block.at("values"), "design.c.values");
    if (values.size() != n) {
      throw ConfigError("config: 'design.c.values' length must equal n_param");
    }
    return CriterionSpec::c(std::move(values));
  }
  // Gaussian bump evaluated at the cell centers (prediction-functional
  // linearization for the goal-oriented criterion).
  require(setup.grid_nx > 0 && setup.grid_ny > 0,
          "config: gaussian_bump c-vector needs a grid problem");
  const double cx = c_block.at("center")[0].get<double>();
  const double cy = c_block.at("center")[1].get<double>();
  const double width = c_block.at("width").get<double>();
  if (width <= 0.0) throw ConfigError("config: 'design.c.width' must be > 0");
  Vector c(n);
  const auto& model_config = setup.model->config();
  const double hx = setup.model->hx();
  const double hy = setup.model->hy();
  for (Index j = 0; j < model_config.ny; ++j) {
    for (Index i = 0; i < model_config.nx; ++i) {
      const double x = (static_cast<double>(i) + 0.5) * hx;
      const double y = (static_cast<double>(j) + 0.5) * hy;
      const double dx = x - cx;
      const double dy = y - cy;
      c[j * model_config.nx + i] =
          std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
    }
  }
  return CriterionSpec::c(std::move(c));
}

LinearSetup ExperimentConfig::build_linear() const {
  LinearSetup setup;
  if (problem_kind_ == "toy_diag") {
    const Vector variances =
        get_vector(problem_block_.at("variances"), "problem.variances");
    require((variances.array() > 0.0).all(),
            "config: toy variances must be positive");
    const Index n = variances.size();
    models::ToyDenseModel toy(Matrix::Identity(n, n), MassMatrix::identity(n));
    setup.problem = std::make_shared<BayesianLinearProblem>(
        toy.forward_operator(), DenseGaussianPrior::diagonal(variances),
        noise_sigma_);
    for (Index i = 0; i < n; ++i) {
      setup.sensor_coords.push_back(
          {static_cast<double>(i), 0.0});  // nominal 1D positions
    }
    return setup;
  }

  require(problem_kind_ == "advection_diffusion",
          "config: build_linear only handles linear problem kinds");
  models::AdvectionDiffusionConfig model_config;
  model_config.nx = problem_block_.at("nx").get<Index>();
  model_config.ny = problem_block_.at("ny").get<Index>();
  model_config.kappa = problem_block_.at("kappa").get<double>();
  model_config.velocity_x = problem_block_.at("velocity")[0].get<double>();
  model_config.velocity_y = problem_block_.at("velocity")[1].get<double>();
  model_config.t_final = problem_block_.at("t_final").get<double>();
  model_config.n_steps = problem_block_.at("n_steps").get<Index>();
  model_config.length_x = problem_block_.at("lengths")[0].get<double>();
  model_config.length_y = problem_block_.at("lengths")[1].get<double>();

  auto model = std::make_shared<models::AdvectionDiffusionModel>(model_config);

  const Json& sensors_block = problem_block_.at("sensors");
  const std::string mode = sensors_block.at("mode").get<std::string>();
  std::vector<models::Point2> coords;
  if (mode == "lattice") {
    coords = models::sensor_lattice(
        sensors_block.at("nx").get<Index>(), sensors_block.at("ny").get<Index>(),
        model_config.length_x, model_config.length_y,
        sensors_block.at("margin").get<double>());
  } else if (mode == "random") {
    const Index count = sensors_block.at("count").get<Index>();
    const double margin = sensors_block.at("margin").get<double>();
    rng::Engine engine(
        static_cast<std::uint64_t>(sensors_block.at("seed").get<Index>()));
    for (Index s = 0; s < count; ++s) {
      coords.push_back(
          {(margin + (1.0 - 2.0 * margin) * engine.next_uniform()) *
               model_config.length_x,
           (margin + (1.0 - 2.0 * margin) * engine.next_uniform()) *
               model_config.length_y});
    }
  } else {
    for (const auto& point : sensors_block.at("points")) {
      const Vector xy = get_vector(point, "problem.sensors.points[]");
      if (xy.size() != 2) {
        throw ConfigError("config: sensor points must be [x, y] pairs");
      }
      coords.push_back({xy[0], xy[1]});
    }
  }

  auto sensors = std::make_shared<models::SensorArray>(
      coords, model_config.nx, model_config.ny, model_config.length_x,
      model_config.length_y);
  auto prior = EllipticGaussianPrior::make_2d(
      model_config.nx, model_config.ny, model_config.length_x,
      model_config.length_y, prior_block_.at("gamma").get<double>(),
      prior_block_.at("delta").get<double>(),
      Vector::Constant(model->n(), prior_block_.at("mean").get<double>()));

  setup.problem = std::make_shared<BayesianLinearProblem>(
      models::forward_operator(model, sensors), prior, noise_sigma_);
  setup.model = model;
  setup.sensor_coords = coords;
  setup.grid_nx = model_config.nx;
  setup.grid_ny = model_config.ny;
  return setup;
}

SeirdSetup ExperimentConfig::build_seird() const {
  require(problem_kind_ == "seird", "config: build_seird needs a seird problem");

  nonlinear::SeirdConfig model_config;
  model_config.n_pop = problem_block_.at("n_pop").get<double>();
  model_config.t_end = problem_block_.at("t_end").get<double>();
  model_config.n_beta = problem_block_.at("n_beta").get<Index>();
  model_config.rk_steps = problem_block_.at("rk_steps").get<Index>();
  const auto& initial = problem_block_.at("initial");
  model_config.s0 = initial[0].get<double>();
  model_config.e0 = initial[1].get<double>();
  model_config.i0 = initial[2].get<double>();
  model_config.r0 = initial[3].get<double>();
  model_config.d0 = initial[4].get<double>();

  const Json& times_block = problem_block_.at("candidate_times");
  Vector times;
  if (times_block.at("mode").get<std::string>() == "uniform") {
    const Index count = times_block.at("count").get<Index>();
    require(count >= 1, "config: candidate time count must be >= 1");
    times.resize(count);
    for (Index j = 0; j < count; ++j) {
      times[j] = model_config.t_end * static_cast<double>(j + 1) /
                 static_cast<double>(count);
    }
  } else {
    times = get_vector(times_block.at("times"), "problem.candidate_times.times");
  }

  const Json& nominal = problem_block_.at("nominal");
  Vector mean(model_config.n_beta + 3);
  mean.head(model_config.n_beta)
      .setConstant(std::log(nominal.at("beta").get<double>()));
  mean[model_config.n_beta] = std::log(nominal.at("sigma_e").get<double>());
  mean[model_config.n_beta + 1] =
      std::log(nominal.at("gamma_rec").get<double>());
  mean[model_config.n_beta + 2] =
      std::log(nominal.at("delta_mort").get<double>());

  const Vector scalar_sigmas =
      get_vector(prior_block_.at("scalar_sigmas"), "prior.scalar_sigmas");
  auto prior = EllipticGaussianPrior::make_1d_with_scalars(
      model_config.n_beta, model_config.t_end,
      prior_block_.at("beta_gamma").get<double>(),
      prior_block_.at("beta_delta").get<double>(), scalar_sigmas, mean);

  SeirdSetup setup;
  auto forward = std::make_shared<nonlinear::SeirdLogForwardMap>(
      nonlinear::SeirdModel(model_config), times);
  setup.forward = forward;
  setup.problem = std::make_shared<nonlinear::NonlinearProblem>(
      forward, prior, noise_sigma_);
  setup.candidate_times = times;
  return setup;
}

}  // namespace oed::config
