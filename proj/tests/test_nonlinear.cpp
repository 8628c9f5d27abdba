// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <memory>

#include "oed/criteria.hpp"
#include "oed/models/toy.hpp"
#include "oed/nonlinear/problem.hpp"
#include "oed/random.hpp"
#include "oracles.hpp"

using namespace oed;
using namespace oed::nonlinear;

namespace {

SeirdConfig test_seird_config() {
  SeirdConfig config;
  config.t_end = 100.0;
  config.n_beta = 6;
  config.rk_steps = 160;
  return config;
}

SeirdRawParams nominal_params(const SeirdConfig& config) {
  SeirdRawParams params;
  params.beta_nodes = Vector::Constant(config.n_beta, 0.35);
  params.sigma_e = 0.2;
  params.gamma_rec = 0.1;
  params.delta_mort = 0.015;
  return params;
}

Vector uniform_times(Index count, double t_end) {
  Vector times(count);
  for (Index j = 0; j < count; ++j) {
    times[j] = t_end * static_cast<double>(j + 1) / static_cast<double>(count);
  }
  return times;
}

/// Stacked log-parameter SEIRD inverse problem over `n_times` candidate
/// observation times.
std::shared_ptr<NonlinearProblem> make_seird_problem(Index n_times = 8) {
  const SeirdConfig config = test_seird_config();
  const SeirdRawParams nominal = nominal_params(config);

  Vector mean(config.n_beta + 3);
  mean.head(config.n_beta) =
      nominal.beta_nodes.array().log().matrix();
  mean[config.n_beta] = std::log(nominal.sigma_e);
  mean[config.n_beta + 1] = std::log(nominal.gamma_rec);
  mean[config.n_beta + 2] = std::log(nominal.delta_mort);

  Vector scalar_sigmas(3);
  scalar_sigmas << 0.3, 0.3, 0.3;
  auto prior = EllipticGaussianPrior::make_1d_with_scalars(
      config.n_beta, config.t_end, 8.0, 0.25, scalar_sigmas, mean);

  auto forward = std::make_shared<SeirdLogForwardMap>(
      SeirdModel(config), uniform_times(n_times, config.t_end));
  return std::make_shared<NonlinearProblem>(forward, prior, 0.01);
}

/// Linear toy problem shared between the linear-Gaussian machinery and its
/// nonlinear wrapper (Laplace approximation is exact here).
struct LinearPair {
  std::shared_ptr<BayesianLinearProblem> linear;
  std::shared_ptr<NonlinearProblem> wrapped;
};

LinearPair make_linear_pair(std::uint64_t seed, Index n = 6, Index n_s = 4) {
  rng::Engine engine(seed);
  Matrix f(n_s, n);
  for (Index i = 0; i < n_s * n; ++i) f(i / n, i % n) = engine.next_normal();
  Matrix root(n, n);
  for (Index i = 0; i < n * n; ++i) root(i / n, i % n) = engine.next_normal();
  const Matrix cov = root * root.transpose() + 0.5 * Matrix::Identity(n, n);
  const Vector mean = rng::standard_normal(n, engine);
  auto prior =
      std::make_shared<DenseGaussianPrior>(cov, MassMatrix::identity(n), mean);

  models::ToyDenseModel toy(f, MassMatrix::identity(n));
  LinearPair pair;
  pair.linear = std::make_shared<BayesianLinearProblem>(toy.forward_operator(),
                                                        prior, 0.6);
  pair.wrapped = std::make_shared<NonlinearProblem>(
      std::make_shared<LinearForwardMap>(f), prior, 0.6);
  return pair;
}

}  // namespace

TEST_CASE("SEIRD dynamics") {
  const SeirdConfig config = test_seird_config();
  const SeirdModel model(config);

  SUBCASE("no transmission: S constant, E + I decays") {
    SeirdRawParams params = nominal_params(config);
    params.beta_nodes.setZero();
    const Matrix states = model.trajectory(params);
    const double s0 = states(0, 1);
    double previous_ei = states(0, 2) + states(0, 3);
    for (Index k = 0; k < states.rows(); ++k) {
      CHECK(std::abs(states(k, 1) - s0) <= 1e-12);
      const double ei = states(k, 2) + states(k, 3);
      CHECK(ei <= previous_ei + 1e-14);
      previous_ei = ei;
    }
    CHECK(states(states.rows() - 1, 2) <= 1e-3 * states(0, 2));
  }

  SUBCASE("population is conserved along the trajectory") {
    const Matrix states = model.trajectory(nominal_params(config));
    for (Index k = 0; k < states.rows(); ++k) {
      const double total = states.row(k).tail(5).sum();
      CHECK(std::abs(total - config.n_pop) <= 1e-10);
    }
  }

  SUBCASE("RK4 observed convergence order is at least 3.5") {
    const Vector times = uniform_times(4, config.t_end);
    auto observe = [&](Index steps) {
      SeirdConfig refined = config;
      refined.rk_steps = steps;
      return SeirdModel(refined).observe_infected(nominal_params(config), times);
    };
    const Vector coarse = observe(40);
    const Vector medium = observe(80);
    const Vector fine = observe(160);
    const double error_coarse = (coarse - medium).norm();
    const double error_fine = (medium - fine).norm();
    const double order = std::log2(error_coarse / error_fine);
    CHECK(order >= 3.5);
  }

  SUBCASE("invalid observation times are rejected") {
    const SeirdRawParams params = nominal_params(config);
    Vector bad(1);
    bad << -1.0;
    CHECK_THROWS_AS(model.observe_infected(params, bad), std::invalid_argument);
    bad << config.t_end * 2.0;
    CHECK_THROWS_AS(model.observe_infected(params, bad), std::invalid_argument);
  }

  SUBCASE("state blow-up reports the failing step") {
    SeirdConfig coarse = config;
    coarse.rk_steps = 4;  // absurdly large steps with a huge rate
    SeirdRawParams params = nominal_params(config);
    params.beta_nodes.setConstant(500.0);
    const SeirdModel unstable(coarse);
    CHECK_THROWS_AS(
        unstable.observe_infected(params, uniform_times(2, config.t_end)),
        SolverError);
  }
}

TEST_CASE("SEIRD Jacobian") {
  auto problem = make_seird_problem();
  const auto& forward = problem->forward();
  rng::Engine engine(3);
  const Vector m = problem->prior().mean() +
                   0.1 * rng::standard_normal(problem->n_param(), engine);
  const Matrix jacobian = forward.jacobian(m);

  SUBCASE("matches central finite differences") {
    const double h = 1e-6;
    for (int trial = 0; trial < 3; ++trial) {
      const Vector direction = rng::standard_normal(problem->n_param(), engine);
      const Vector fd =
          (forward.apply(m + h * direction) - forward.apply(m - h * direction)) /
          (2.0 * h);
      const Vector jv = jacobian * direction;
      CHECK((jv - fd).norm() <= 1e-5 * fd.norm());
    }
  }

  SUBCASE("zero direction maps to zero") {
    CHECK(jacobian_apply(forward, m, Vector::Zero(problem->n_param())).norm() ==
          0.0);
  }

  SUBCASE("M-weighted adjoint identity") {
    const Vector v = rng::standard_normal(problem->n_param(), engine);
    const Vector d = rng::standard_normal(problem->n_candidates(), engine);
    const double forward_side = jacobian_apply(forward, m, v).dot(d);
    const Vector adjoint =
        jacobian_adjoint_apply(forward, problem->mass(), m, d);
    const double adjoint_side = m_inner(v, adjoint, problem->mass());
    CHECK(std::abs(forward_side - adjoint_side) <=
          1e-10 * (std::abs(forward_side) + 1.0));
  }
}

TEST_CASE("MAP solve") {
  SUBCASE("linear specialization matches the linear-Gaussian MAP") {
    const LinearPair pair = make_linear_pair(7);
    rng::Engine engine(11);
    Vector w(pair.linear->n_sensors());
    for (Index i = 0; i < w.size(); ++i) w[i] = engine.next_uniform();
    const DesignVector design(w);
    const Vector y = rng::standard_normal(pair.linear->n_sensors(), engine);

    LinearGaussianPosterior posterior(pair.linear, design);
    const Vector exact = posterior.map_point(y);
    const MapSolveResult solved = map_solve(*pair.wrapped, y, design);
    CHECK((solved.m_map - exact).norm() <= 1e-6 * exact.norm());
  }

  SUBCASE("prior-consistent data returns the prior mean") {
    auto problem = make_seird_problem();
    const Vector y = problem->forward().apply(problem->prior().mean());
    const MapSolveResult solved =
        map_solve(*problem, y, DesignVector::ones(problem->n_candidates()));
    CHECK((solved.m_map - problem->prior().mean()).norm() <= 1e-8);
  }

  SUBCASE("gradient residual obeys the advertised tolerance") {
    auto problem = make_seird_problem();
    rng::Engine engine(13);
    const Vector truth = problem->prior().sample(17);
    const Vector y =
        problem->forward().apply(truth) +
        problem->sigma() * rng::standard_normal(problem->n_candidates(), engine);
    const MapSolveResult solved =
        map_solve(*problem, y, DesignVector::ones(problem->n_candidates()));

    const double inv_var = 1.0 / (problem->sigma() * problem->sigma());
    const Vector residual = problem->forward().apply(solved.m_map) - y;
    const Matrix jacobian = problem->forward().jacobian(solved.m_map);
    const Vector gradient =
        inv_var * problem->mass().apply_inv(jacobian.transpose() * residual) +
        problem->prior().apply_precision(solved.m_map - problem->prior().mean());
    CHECK(m_norm(gradient, problem->mass()) <= solved.gradient_norm + 1e-12);
    CHECK(solved.gradient_norm <= 1e-5);
  }
}

TEST_CASE("Bayes risk sample average") {
  SUBCASE("matches phi_A on a linear problem") {
    const LinearPair pair = make_linear_pair(19);
    const DesignVector w = DesignVector::ones(pair.linear->n_sensors());
    const auto risk = bayes_risk_saa(*pair.wrapped, w, 400, 23);
    const double reference = phi_A(*pair.linear, w, {});
    CHECK(risk.n_failed == 0);
    CHECK(std::abs(risk.value - reference) <= 3.0 * risk.standard_error);
  }

  SUBCASE("no data means prior risk, and more data helps") {
    const LinearPair pair = make_linear_pair(29);
    const Index n_s = pair.linear->n_sensors();
    const TrainingSet training = TrainingSet::draw(*pair.wrapped, 300, 31);

    const auto none = bayes_risk_saa(*pair.wrapped, DesignVector::zeros(n_s), training);
    const auto full = bayes_risk_saa(*pair.wrapped, DesignVector::ones(n_s), training);
    CHECK(full.value <=
          none.value + 3.0 * (none.standard_error + full.standard_error));

    // With w = 0 every MAP point is the prior mean.
    const double prior_trace = pair.wrapped->prior().trace_cov();
    CHECK(std::abs(none.value - prior_trace) <= 3.0 * none.standard_error);
  }

  SUBCASE("deterministic given seeds") {
    const LinearPair pair = make_linear_pair(37);
    const DesignVector w = DesignVector::ones(pair.linear->n_sensors());
    const auto first = bayes_risk_saa(*pair.wrapped, w, 50, 41);
    const auto second = bayes_risk_saa(*pair.wrapped, w, 50, 41);
    CHECK(first.value == second.value);
  }
}

TEST_CASE("Laplace criteria are exact for linear maps") {
  const LinearPair pair = make_linear_pair(43);
  const Index n_s = pair.linear->n_sensors();
  rng::Engine engine(47);
  Vector w_values(n_s);
  for (Index i = 0; i < n_s; ++i) w_values[i] = engine.next_uniform();
  const DesignVector w(w_values);
  const TrainingSet training = TrainingSet::draw(*pair.wrapped, 8, 53);

  SUBCASE("psi_A reproduces phi_A sample by sample") {
    const auto psi = psi_A_gaussian(*pair.wrapped, w, training);
    const double reference =
        phi_A(*pair.linear, w, {EstimatorRoute::ExactDense});
    CHECK(std::abs(psi.value - reference) <= 1e-6 * std::abs(reference));
    for (Index i = 0; i < psi.per_sample.size(); ++i) {
      CHECK(std::abs(psi.per_sample[i] - reference) <=
            1e-6 * std::abs(reference));
    }
  }

  SUBCASE("psi_A at w = 0 is the prior trace for every sample") {
    const auto psi =
        psi_A_gaussian(*pair.wrapped, DesignVector::zeros(n_s), training);
    const double prior_trace = pair.wrapped->prior().trace_cov();
    for (Index i = 0; i < psi.per_sample.size(); ++i) {
      CHECK(psi.per_sample[i] ==
            doctest::Approx(prior_trace).epsilon(1e-10));
    }
  }

  SUBCASE("psi_c reproduces phi_c and is nonnegative") {
    const Vector c = rng::standard_normal(pair.wrapped->n_param(), engine);
    const auto psi = psi_c_gaussian(*pair.wrapped, w, training, c);
    const double reference = phi_c(*pair.linear, w, c);
    CHECK(std::abs(psi.value - reference) <= 1e-6 * std::abs(reference));
    CHECK((psi.per_sample.array() >= 0.0).all());

    const auto zero = psi_c_gaussian(*pair.wrapped, w, training,
                                     Vector::Zero(pair.wrapped->n_param()));
    CHECK(zero.value == doctest::Approx(0.0));
  }
}

TEST_CASE("SEIRD Laplace and risk smoke runs") {
  auto problem = make_seird_problem(6);
  const TrainingSet training = TrainingSet::draw(*problem, 12, 59);

  const auto psi = psi_A_gaussian(*problem, DesignVector::ones(6), training);
  CHECK(std::isfinite(psi.value));
  CHECK(psi.value > 0.0);
  CHECK(psi.standard_error >= 0.0);

  // Adding observation times improves the sampled criteria (statistically).
  Vector w_few = Vector::Zero(6);
  w_few[2] = 1.0;
  Vector w_more = w_few;
  w_more[4] = 1.0;
  w_more[5] = 1.0;
  const auto risk_few = bayes_risk_saa(*problem, DesignVector(w_few), training);
  const auto risk_more = bayes_risk_saa(*problem, DesignVector(w_more), training);
  CHECK(risk_more.value <=
        risk_few.value +
            3.0 * (risk_few.standard_error + risk_more.standard_error));
}
