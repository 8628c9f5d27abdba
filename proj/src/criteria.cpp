// SPDX-License-Identifier: Apache-2.0
#include "oed/criteria.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <iostream>
#include <vector>

#include "oed/parallel.hpp"
#include "oed/random.hpp"

namespace oed {

namespace {

constexpr double kEigenvalueFloor = -1e-10;

/// logdet(I + S) for a symmetric matrix S with eigenvalues >= 0 up to
/// roundoff. Eigenvalues below the floor trip an error; small negative noise
/// is clamped.
double logdet_i_plus_sym(const Matrix& s) {
  if (s.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
  require(eig.info() == Eigen::Success, "logdet: eigendecomposition failed");
  const double scale = 1.0 + eig.eigenvalues().cwiseAbs().maxCoeff();
  double total = 0.0;
  for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double lambda = eig.eigenvalues()[i];
    require(lambda >= kEigenvalueFloor * scale,
            "logdet: operator has a significantly negative eigenvalue");
    total += std::log1p(std::max(lambda, 0.0));
  }
  return total;
}

/// Dense matrix of the posterior covariance operator, assembled by column
/// (the ExactDense oracle route).
Matrix dense_posterior_cov(const BayesianLinearProblem& problem,
                           const DesignVector& w) {
  const Index n = problem.n_param();
  LinearGaussianPosterior post(
      std::shared_ptr<const BayesianLinearProblem>(&problem, [](auto*) {}), w);
  Matrix hessian(n, n);
  Vector basis = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    basis[j] = 1.0;
    hessian.col(j) = post.apply_hessian(basis);
    basis[j] = 0.0;
  }
  return hessian.inverse();
}

Vector draw_probe(ProbeDistribution probe, Index n, rng::Engine& engine) {
  return probe == ProbeDistribution::Rademacher ? rng::rademacher(n, engine)
                                                : rng::standard_normal(n, engine);
}

}  // namespace

double SketchResult::logdet_i_plus() const { return logdet_i_plus_sym(t); }

SketchResult subspace_iteration(
    const std::function<Vector(const Vector&)>& apply_op, Index n, Index ell,
    int q, std::uint64_t seed) {
  require(n >= 1, "subspace_iteration: n must be >= 1");
  require(ell >= 1 && ell <= n, "subspace_iteration: need 1 <= ell <= n");
  require(q >= 1, "subspace_iteration: q must be >= 1");

  Matrix sketch(n, ell);
  par::parallel_for(ell, [&](Index j) {
    rng::Engine engine(rng::substream(seed, "sketch-omega", j));
    Vector column = rng::standard_normal(n, engine);
    for (int power = 0; power < q; ++power) column = apply_op(column);
    sketch.col(j) = column;
  });

  Eigen::ColPivHouseholderQR<Matrix> qr(sketch);
  const Index rank = std::min<Index>(qr.rank(), ell);

  SketchResult result;
  result.ell_requested = ell;
  result.ell_effective = rank;
  if (rank < ell) {
    std::cerr << "subspace_iteration: test matrix is rank deficient, shrinking "
              << "ell from " << ell << " to " << rank << "\n";
  }
  if (rank == 0) {
    result.t = Matrix::Zero(0, 0);
    result.basis = Matrix::Zero(n, 0);
    return result;
  }

  result.basis = qr.householderQ() * Matrix::Identity(n, rank);
  Matrix projected(n, rank);
  par::parallel_for(rank, [&](Index j) {
    projected.col(j) = apply_op(result.basis.col(j));
  });
  const Matrix t_raw = result.basis.transpose() * projected;
  result.t_asymmetry = (t_raw - t_raw.transpose()).cwiseAbs().maxCoeff();
  result.t = 0.5 * (t_raw + t_raw.transpose());
  return result;
}

std::function<Vector(const Vector&)> prior_preconditioned_hessian(
    const BayesianLinearProblem& problem, const DesignVector& w) {
  require(w.size() == problem.n_sensors(),
          "prior_preconditioned_hessian: design size mismatch");
  const double inv_var = 1.0 / (problem.sigma() * problem.sigma());
  const Vector weights = w.weights();
  return [&problem, weights, inv_var](const Vector& v) {
    const Vector data = problem.forward().apply(problem.prior().apply_sqrt_cov(v));
    return Vector(inv_var * problem.prior().apply_sqrt_cov_transpose(
                                problem.forward().apply_transpose(
                                    weights.cwiseProduct(data))));
  };
}

double phi_A(const BayesianLinearProblem& problem, const DesignVector& w,
             const EstimatorConfig& config, EstimatorDiagnostics* diagnostics) {
  config.validate();
  require(w.size() == problem.n_sensors(), "phi_A: design size mismatch");

  switch (config.route) {
    case EstimatorRoute::ExactDense: {
      const double value = dense_posterior_cov(problem, w).trace();
      if (diagnostics) *diagnostics = {.route = "exact_dense", .value = value};
      return value;
    }

    case EstimatorRoute::MonteCarlo: {
      // Mass-weighted Hutchinson probes z_i = M^{-1/2} v_i, so that
      // E <z, Gamma_post z>_M = tr(Gamma_post). Probe applies go through the
      // measurement-space form of the covariance.
      auto problem_alias =
          std::shared_ptr<const BayesianLinearProblem>(&problem, [](auto*) {});
      LinearGaussianPosterior post(problem_alias, w);
      const Index n = problem.n_param();
      std::vector<double> samples(static_cast<std::size_t>(config.n_mc));
      par::parallel_for(config.n_mc, [&](Index i) {
        rng::Engine engine(rng::substream(config.seed, "trace-probe",
                                          static_cast<std::uint64_t>(i)));
        const Vector z = problem.mass().apply_inv_sqrt(
            draw_probe(config.probe, n, engine));
        samples[static_cast<std::size_t>(i)] =
            m_inner(z, post.apply_post_cov_smw(z), problem.mass());
      });
      double mean = 0.0;
      for (double s : samples) mean += s;
      mean /= config.n_mc;
      double variance = 0.0;
      for (double s : samples) variance += (s - mean) * (s - mean);
      variance = config.n_mc > 1 ? variance / (config.n_mc - 1.0) : 0.0;
      if (diagnostics) {
        *diagnostics = {.route = "monte_carlo",
                        .value = mean,
                        .mc_standard_error = std::sqrt(variance / config.n_mc),
                        .mc_samples = config.n_mc};
      }
      return mean;
    }

    case EstimatorRoute::MeasurementSpace: {
      // tr(C_pr) - sigma^{-2} tr((I + sigma^{-2} W X)^{-1} W Y).
      auto problem_alias =
          std::shared_ptr<const BayesianLinearProblem>(&problem, [](auto*) {});
      LinearGaussianPosterior post(problem_alias, w);
      const MeasurementSpaceCache& cache = problem.measurement_cache();
      const double inv_var = 1.0 / (problem.sigma() * problem.sigma());
      const Matrix weighted = w.weights().asDiagonal() * cache.y;
      const double correction = post.inner_lu().solve(weighted).trace();
      const double value = problem.prior_trace() - inv_var * correction;
      if (diagnostics) {
        *diagnostics = {.route = "measurement_space", .value = value};
      }
      return value;
    }

    case EstimatorRoute::SubspaceIteration:
    case EstimatorRoute::AdjointFree:
      throw std::invalid_argument(
          "phi_A: route is not defined for the A-criterion; use "
          "subspace_iteration directly for operator traces");
  }
  throw std::logic_error("phi_A: unhandled route");
}

double phi_c(const BayesianLinearProblem& problem, const DesignVector& w,
             const Vector& c) {
  require(c.size() == problem.n_param(), "phi_c: c dimension mismatch");
  require(w.size() == problem.n_sensors(), "phi_c: design size mismatch");
  if (c.isZero(0.0)) return 0.0;
  auto problem_alias =
      std::shared_ptr<const BayesianLinearProblem>(&problem, [](auto*) {});
  LinearGaussianPosterior post(problem_alias, w);
  return m_inner(post.apply_post_cov_smw(c), c, problem.mass());
}

double phi_D(const BayesianLinearProblem& problem, const DesignVector& w,
             const EstimatorConfig& config, EstimatorDiagnostics* diagnostics) {
  config.validate();
  require(w.size() == problem.n_sensors(), "phi_D: design size mismatch");
  const double inv_var = 1.0 / (problem.sigma() * problem.sigma());

  switch (config.route) {
    case EstimatorRoute::ExactDense: {
      // Dense prior-preconditioned Hessian, assembled column by column.
      const Index n = problem.n_param();
      const auto apply = prior_preconditioned_hessian(problem, w);
      Matrix htilde(n, n);
      Vector basis = Vector::Zero(n);
      for (Index j = 0; j < n; ++j) {
        basis[j] = 1.0;
        htilde.col(j) = apply(basis);
        basis[j] = 0.0;
      }
      const double value = -logdet_i_plus_sym(htilde);
      if (diagnostics) *diagnostics = {.route = "exact_dense", .value = value};
      return value;
    }

    case EstimatorRoute::MeasurementSpace: {
      // Sylvester identity: logdet(I + Htilde) = logdet(I + sigma^{-2} W X),
      // evaluated through the symmetric W^{1/2} X W^{1/2} form.
      const MeasurementSpaceCache& cache = problem.measurement_cache();
      const Vector sqrt_w = w.weights().cwiseSqrt();
      const Matrix inner = inv_var * sqrt_w.asDiagonal() * cache.x *
                           sqrt_w.asDiagonal();
      const double value = -logdet_i_plus_sym(inner);
      if (diagnostics) {
        *diagnostics = {.route = "measurement_space", .value = value};
      }
      return value;
    }

    case EstimatorRoute::SubspaceIteration: {
      const SketchResult sketch =
          subspace_iteration(prior_preconditioned_hessian(problem, w),
                             problem.n_param(), config.ell, config.q,
                             config.seed);
      const double value = -sketch.logdet_i_plus();
      if (diagnostics) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(sketch.t);
        *diagnostics = {.route = "subspace_iteration",
                        .value = value,
                        .sketch_eigenvalues = eig.eigenvalues(),
                        .sketch_rank = sketch.ell_effective};
      }
      return value;
    }

    case EstimatorRoute::AdjointFree:
      return phi_D_adjoint_free(problem, w, config.r, diagnostics);

    case EstimatorRoute::MonteCarlo:
      throw std::invalid_argument(
          "phi_D: the Monte Carlo trace route does not apply to the "
          "D-criterion");
  }
  throw std::logic_error("phi_D: unhandled route");
}

double phi_D_adjoint_free(const BayesianLinearProblem& problem,
                          const DesignVector& w, Index r,
                          EstimatorDiagnostics* diagnostics) {
  require(r >= 1 && r <= problem.n_param(),
          "phi_D_adjoint_free: need 1 <= r <= n");
  require(w.size() == problem.n_sensors(),
          "phi_D_adjoint_free: design size mismatch");

  // Rank-r eigendecomposition of the prior covariance operator through the
  // symmetric form M^{1/2} C M^{-1/2}; dense at desk scale.
  const Index n = problem.n_param();
  const MassMatrix& mass = problem.mass();
  Matrix cov(n, n);
  Vector basis = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    basis[j] = 1.0;
    cov.col(j) = problem.prior().apply_cov(basis);
    basis[j] = 0.0;
  }
  const Vector sqrt_m = mass.diag().cwiseSqrt();
  const Matrix sym = sqrt_m.asDiagonal() * cov * sqrt_m.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sym + sym.transpose()));
  require(eig.info() == Eigen::Success,
          "phi_D_adjoint_free: prior eigendecomposition failed");

  // Keep the r largest eigenpairs; warn if r exceeds the numerical rank.
  const Vector all = eig.eigenvalues();
  const double rank_tol = all.cwiseAbs().maxCoeff() * 1e-14;
  Index numerical_rank = 0;
  for (Index i = 0; i < n; ++i) {
    if (all[i] > rank_tol) ++numerical_rank;
  }
  if (r > numerical_rank) {
    std::cerr << "phi_D_adjoint_free: requested rank " << r
              << " exceeds the numerically detectable rank " << numerical_rank
              << ", proceeding\n";
  }

  const double inv_var = 1.0 / (problem.sigma() * problem.sigma());
  Matrix f_tilde(problem.n_sensors(), r);
  par::parallel_for(r, [&](Index k) {
    const Index source = n - 1 - k;  // eigenvalues ascend
    const double lambda = std::max(all[source], 0.0);
    const Vector direction =
        mass.apply_inv_sqrt(eig.eigenvectors().col(source));
    f_tilde.col(k) = std::sqrt(lambda) * problem.forward().apply(direction);
  });

  const Matrix low_rank = inv_var * f_tilde.transpose() *
                          w.weights().asDiagonal() * f_tilde;
  const double value = -logdet_i_plus_sym(low_rank);
  if (diagnostics) {
    *diagnostics = {.route = "adjoint_free", .value = value,
                    .sketch_rank = std::min(r, numerical_rank)};
  }
  return value;
}

Vector grad_phi(const BayesianLinearProblem& problem, const DesignVector& w,
                const CriterionSpec& spec, const EstimatorConfig& config) {
  spec.validate(problem.n_param());
  require(w.size() == problem.n_sensors(), "grad_phi: design size mismatch");
  const double inv_var = 1.0 / (problem.sigma() * problem.sigma());
  const Index n_s = problem.n_sensors();

  if (config.route == EstimatorRoute::ExactDense) {
    const Matrix post_cov = dense_posterior_cov(problem, w);
    const Matrix f = dense_assemble(problem.forward());
    const Matrix f_star =
        problem.mass().diag().cwiseInverse().asDiagonal() * f.transpose();
    Vector grad(n_s);
    switch (spec.kind) {
      case CriterionSpec::Kind::C: {
        const Vector fz = f * (post_cov * spec.c_vector);
        grad = -inv_var * fz.array().square();
        return grad;
      }
      case CriterionSpec::Kind::A: {
        const Matrix columns = post_cov * f_star;
        for (Index i = 0; i < n_s; ++i) {
          grad[i] = -inv_var * m_inner(columns.col(i), columns.col(i),
                                       problem.mass());
        }
        return grad;
      }
      case CriterionSpec::Kind::D: {
        const Matrix data_space = f * post_cov * f_star;
        grad = -inv_var * data_space.diagonal();
        return grad;
      }
    }
  }

  // Measurement-space closed forms on the cached matrices (exact).
  auto problem_alias =
      std::shared_ptr<const BayesianLinearProblem>(&problem, [](auto*) {});
  LinearGaussianPosterior post(problem_alias, w);
  const MeasurementSpaceCache& cache = problem.measurement_cache();

  switch (spec.kind) {
    case CriterionSpec::Kind::C: {
      const Vector fz = problem.forward().apply(post.apply_post_cov_smw(spec.c_vector));
      return Vector(-inv_var * fz.array().square());
    }
    case CriterionSpec::Kind::A: {
      // Columns of Gamma_post F* via the SMW form, entirely in the cache:
      // G F* = P - sigma^{-2} P K^{-1} W X.
      const Matrix correction = post.inner_lu().solve(
          Matrix(w.weights().asDiagonal() * cache.x));
      const Matrix columns = cache.p - inv_var * (cache.p * correction);
      Vector grad(n_s);
      for (Index i = 0; i < n_s; ++i) {
        grad[i] =
            -inv_var * m_inner(columns.col(i), columns.col(i), problem.mass());
      }
      return grad;
    }
    case CriterionSpec::Kind::D: {
      // d/dw_i logdet(I + sigma^{-2} W X) = sigma^{-2} (X K^{-1})_{ii}.
      const Matrix k_inv = post.inner_lu().solve(Matrix::Identity(n_s, n_s));
      return Vector(-inv_var * (cache.x * k_inv).diagonal());
    }
  }
  throw std::logic_error("grad_phi: unhandled criterion kind");
}

double evaluate_criterion(const BayesianLinearProblem& problem,
                          const DesignVector& w, const CriterionSpec& spec,
                          const EstimatorConfig& config) {
  spec.validate(problem.n_param());
  switch (spec.kind) {
    case CriterionSpec::Kind::A:
      return phi_A(problem, w, config);
    case CriterionSpec::Kind::C:
      return phi_c(problem, w, spec.c_vector);
    case CriterionSpec::Kind::D:
      return phi_D(problem, w, config);
  }
  throw std::logic_error("evaluate_criterion: unhandled criterion kind");
}

double kl_gaussian_dense(const Vector& mean1, const Matrix& cov1,
                         const Vector& mean2, const Matrix& cov2) {
  const Index n = mean1.size();
  require(mean2.size() == n && cov1.rows() == n && cov1.cols() == n &&
              cov2.rows() == n && cov2.cols() == n,
          "kl_gaussian_dense: inconsistent dimensions");

  const Eigen::LLT<Matrix> llt1(0.5 * (cov1 + cov1.transpose()));
  const Eigen::LLT<Matrix> llt2(0.5 * (cov2 + cov2.transpose()));
  require(llt1.info() == Eigen::Success && llt2.info() == Eigen::Success,
          "kl_gaussian_dense: covariances must be symmetric positive definite");

  auto logdet = [](const Eigen::LLT<Matrix>& llt) {
    return 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
  };

  const Vector shift = mean2 - mean1;
  const double trace_term = llt2.solve(cov1).trace();
  const double quadratic = shift.dot(llt2.solve(shift));
  return 0.5 * (trace_term + quadratic - static_cast<double>(n) +
                logdet(llt2) - logdet(llt1));
}

}  // namespace oed
