// SPDX-License-Identifier: Apache-2.0
#include "oed/nonlinear/problem.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "oed/parallel.hpp"
#include "oed/random.hpp"

namespace oed::nonlinear {

namespace {

constexpr Index kDensePrecisionGuard = 2000;

double weighted_misfit(const Vector& residual, const Vector& w) {
  return residual.dot(w.cwiseProduct(residual));
}

/// Negative log-posterior cost of Eq.-style weighted least squares plus the
/// Cameron-Martin prior term.
double map_cost(const NonlinearProblem& problem, const Vector& m,
                const Vector& y, const Vector& w) {
  const double inv_var = 1.0 / (problem.sigma() * problem.sigma());
  const Vector residual = problem.forward().apply(m) - y;
  const Vector shift = m - problem.prior().mean();
  return 0.5 * inv_var * weighted_misfit(residual, w) +
         0.5 * m_inner(shift, problem.prior().apply_precision(shift),
                       problem.mass());
}

struct SampleStats {
  double mean = 0.0;
  double standard_error = 0.0;
};

SampleStats stats_of(const Vector& values) {
  SampleStats stats;
  const Index n = values.size();
  if (n == 0) return stats;
  stats.mean = values.mean();
  if (n > 1) {
    const double ss = (values.array() - stats.mean).square().sum();
    stats.standard_error = std::sqrt(ss / (n - 1.0) / static_cast<double>(n));
  }
  return stats;
}

/// Runs fn over the training samples concurrently with skip-and-flag error
/// handling (at most 10% failures tolerated).
SampleAverageResult sample_average(
    const TrainingSet& training,
    const std::function<double(Index)>& per_sample_value) {
  const Index n_d = training.size();
  Vector values(n_d);
  std::vector<char> failed(static_cast<std::size_t>(n_d), 0);
  par::parallel_for(n_d, [&](Index i) {
    try {
      values[i] = per_sample_value(i);
    } catch (const SolverError&) {
      failed[static_cast<std::size_t>(i)] = 1;
    }
  });

  Index n_ok = 0;
  Vector kept(n_d);
  for (Index i = 0; i < n_d; ++i) {
    if (!failed[static_cast<std::size_t>(i)]) kept[n_ok++] = values[i];
  }
  SampleAverageResult result;
  result.n_failed = n_d - n_ok;
  if (result.n_failed * 10 > n_d) {
    throw SolverError("sample average: more than 10% of the MAP solves failed (" +
                      std::to_string(result.n_failed) + " of " +
                      std::to_string(n_d) + ")");
  }
  result.per_sample = kept.head(n_ok);
  const SampleStats stats = stats_of(result.per_sample);
  result.value = stats.mean;
  result.standard_error = stats.standard_error;
  return result;
}

}  // namespace

NonlinearProblem::NonlinearProblem(
    std::shared_ptr<const NonlinearForwardMap> forward,
    std::shared_ptr<const GaussianPrior> prior, double sigma)
    : forward_(std::move(forward)), prior_(std::move(prior)), sigma_(sigma) {
  require(forward_ != nullptr && prior_ != nullptr,
          "NonlinearProblem: forward map and prior are required");
  require(sigma_ > 0.0, "NonlinearProblem: sigma must be > 0");
  require(forward_->n_param() == prior_->dim(),
          "NonlinearProblem: forward/prior dimension mismatch");
}

const Matrix& NonlinearProblem::dense_precision() const {
  std::call_once(precision_once_, [this] {
    const Index n = n_param();
    require(n <= kDensePrecisionGuard,
            "NonlinearProblem: parameter dimension exceeds the dense guard");
    precision_.resize(n, n);
    Vector basis = Vector::Zero(n);
    for (Index j = 0; j < n; ++j) {
      basis[j] = 1.0;
      precision_.col(j) = prior_->apply_precision(basis);
      basis[j] = 0.0;
    }
  });
  return precision_;
}

MapSolveResult map_solve(const NonlinearProblem& problem, const Vector& y,
                         const DesignVector& w, std::optional<Vector> m0,
                         const MapSolveOptions& options) {
  require(y.size() == problem.n_candidates(), "map_solve: data size mismatch");
  require(w.size() == problem.n_candidates(), "map_solve: design size mismatch");
  const double inv_var = 1.0 / (problem.sigma() * problem.sigma());
  const MassMatrix& mass = problem.mass();

  Vector m = m0.value_or(problem.prior().mean());
  require(m.size() == problem.n_param(), "map_solve: m0 size mismatch");

  double cost = map_cost(problem, m, y, w.weights());
  double initial_gradient = 0.0;

  MapSolveResult result;
  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    const Vector residual = problem.forward().apply(m) - y;
    const Matrix jacobian = problem.forward().jacobian(m);
    const Vector gradient =
        inv_var * mass.apply_inv(jacobian.transpose() *
                                 w.weights().cwiseProduct(residual)) +
        problem.prior().apply_precision(m - problem.prior().mean());

    const double gradient_norm = m_norm(gradient, mass);
    if (iteration == 0) {
      initial_gradient = std::max(gradient_norm, options.gradient_atol);
    }
    result.iterations = iteration;
    result.gradient_norm = gradient_norm;
    if (gradient_norm <=
        std::max(options.gradient_rtol * initial_gradient,
                 options.gradient_atol)) {
      break;
    }

    // Gauss-Newton step through the M-weighted symmetric form
    // (sigma^{-2} J^T W J + M C^{-1}) delta = -M grad.
    const Matrix normal = inv_var * jacobian.transpose() *
                          w.weights().asDiagonal() * jacobian;
    Matrix lhs = normal + mass.diag().asDiagonal() * problem.dense_precision();
    lhs = 0.5 * (lhs + lhs.transpose()).eval();
    const Eigen::LLT<Matrix> llt(lhs);
    if (llt.info() != Eigen::Success) {
      throw SolverError("map_solve: Gauss-Newton system is not positive definite",
                        iteration, gradient_norm);
    }
    const Vector direction = llt.solve(-mass.apply(gradient));
    const double slope = m_inner(gradient, direction, mass);

    double step = 1.0;
    bool accepted = false;
    for (int backtrack = 0; backtrack < options.max_backtracks; ++backtrack) {
      const Vector candidate = m + step * direction;
      double candidate_cost;
      try {
        candidate_cost = map_cost(problem, candidate, y, w.weights());
      } catch (const SolverError&) {
        step *= 0.5;  // forward model blew up; shrink the step
        continue;
      }
      if (candidate_cost <= cost + options.armijo_c * step * slope) {
        m = candidate;
        cost = candidate_cost;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      throw SolverError(
          "map_solve: line search failed at iteration " +
              std::to_string(iteration) + " (gradient norm " +
              std::to_string(gradient_norm) + "); last iterate retained",
          iteration, gradient_norm);
    }
  }

  result.m_map = m;
  result.cost = cost;
  return result;
}

TrainingSet TrainingSet::draw(const NonlinearProblem& problem, Index n_d,
                              std::uint64_t root_seed) {
  require(n_d >= 1, "TrainingSet: n_d must be >= 1");
  TrainingSet training;
  training.root_seed = root_seed;
  training.params.resize(problem.n_param(), n_d);
  training.data.resize(problem.n_candidates(), n_d);
  par::parallel_for(n_d, [&](Index i) {
    const Vector m = problem.prior().sample(
        rng::substream(root_seed, "prior-samples", static_cast<std::uint64_t>(i)));
    rng::Engine noise(rng::substream(root_seed, "noise", static_cast<std::uint64_t>(i)));
    training.params.col(i) = m;
    training.data.col(i) =
        problem.forward().apply(m) +
        problem.sigma() * rng::standard_normal(problem.n_candidates(), noise);
  });
  return training;
}

LaplacePosterior::LaplacePosterior(const NonlinearProblem& problem,
                                   const DesignVector& w, Vector m_map)
    : problem_(problem), w_(w), m_map_(std::move(m_map)) {
  require(m_map_.size() == problem.n_param(),
          "LaplacePosterior: map point size mismatch");
  jacobian_ = problem.forward().jacobian(m_map_);
  const double inv_var = 1.0 / (problem.sigma() * problem.sigma());
  Matrix weighted = inv_var * jacobian_.transpose() *
                        w_.weights().asDiagonal() * jacobian_ +
                    problem.mass().diag().asDiagonal() * problem.dense_precision();
  weighted_hessian_ = 0.5 * (weighted + weighted.transpose());
  hessian_llt_.compute(weighted_hessian_);
  require(hessian_llt_.info() == Eigen::Success,
          "LaplacePosterior: Hessian is not positive definite");
}

Vector LaplacePosterior::apply_hessian(const Vector& v) const {
  require(v.size() == m_map_.size(), "LaplacePosterior: dimension mismatch");
  // H v = M^{-1} (M H) v keeps the assembled symmetric form in play.
  return problem_.mass().apply_inv(weighted_hessian_ * v);
}

Vector LaplacePosterior::solve_hessian(const Vector& v,
                                       const PcgOptions& options) const {
  return pcg([this](const Vector& z) { return apply_hessian(z); },
             [this](const Vector& r) { return problem_.prior().apply_cov(r); },
             v, problem_.mass(), options);
}

Vector LaplacePosterior::solve_hessian_dense(const Vector& v) const {
  // H^{-1} v = (M H)^{-1} M v.
  return hessian_llt_.solve(problem_.mass().apply(v));
}

double LaplacePosterior::trace_inverse() const {
  // tr(H^{-1}) = tr((M H)^{-1} M); both factors are available densely.
  const Matrix inverse_weighted =
      hessian_llt_.solve(Matrix::Identity(m_map_.size(), m_map_.size()));
  return (inverse_weighted * problem_.mass().diag().asDiagonal()).trace();
}

SampleAverageResult bayes_risk_saa(const NonlinearProblem& problem,
                                   const DesignVector& w,
                                   const TrainingSet& training,
                                   const MapSolveOptions& options) {
  require(training.params.rows() == problem.n_param() &&
              training.data.rows() == problem.n_candidates(),
          "bayes_risk_saa: training set does not match the problem");
  return sample_average(training, [&](Index i) {
    const MapSolveResult solved =
        map_solve(problem, training.data.col(i), w, std::nullopt, options);
    const double error =
        m_norm(solved.m_map - training.params.col(i), problem.mass());
    return error * error;
  });
}

SampleAverageResult bayes_risk_saa(const NonlinearProblem& problem,
                                   const DesignVector& w, Index n_d,
                                   std::uint64_t root_seed,
                                   const MapSolveOptions& options) {
  return bayes_risk_saa(problem, w, TrainingSet::draw(problem, n_d, root_seed),
                        options);
}

SampleAverageResult psi_A_gaussian(const NonlinearProblem& problem,
                                   const DesignVector& w,
                                   const TrainingSet& training,
                                   const LaplaceTraceConfig& trace,
                                   const MapSolveOptions& options) {
  return sample_average(training, [&](Index i) {
    const MapSolveResult solved =
        map_solve(problem, training.data.col(i), w, std::nullopt, options);
    const LaplacePosterior laplace(problem, w, solved.m_map);
    if (!trace.monte_carlo) return laplace.trace_inverse();

    // Mass-weighted Hutchinson probes on H^{-1}.
    double total = 0.0;
    for (int probe = 0; probe < trace.n_mc; ++probe) {
      rng::Engine engine(rng::substream(
          trace.seed, "laplace-probe",
          static_cast<std::uint64_t>(i) * 1000003ULL + probe));
      const Vector z = problem.mass().apply_inv_sqrt(
          rng::rademacher(problem.n_param(), engine));
      total += m_inner(z, laplace.solve_hessian(z), problem.mass());
    }
    return total / trace.n_mc;
  });
}

SampleAverageResult psi_c_gaussian(const NonlinearProblem& problem,
                                   const DesignVector& w,
                                   const TrainingSet& training, const Vector& c,
                                   const MapSolveOptions& options) {
  require(c.size() == problem.n_param(), "psi_c_gaussian: c size mismatch");
  return sample_average(training, [&](Index i) {
    const MapSolveResult solved =
        map_solve(problem, training.data.col(i), w, std::nullopt, options);
    const LaplacePosterior laplace(problem, w, solved.m_map);
    return m_inner(laplace.solve_hessian(c), c, problem.mass());
  });
}

Vector grad_bayes_risk_saa(const NonlinearProblem& problem,
                           const DesignVector& w, const TrainingSet& training,
                           const MapSolveOptions& options) {
  const Index n_d = training.size();
  const Index n_s = problem.n_candidates();
  const double inv_var = 1.0 / (problem.sigma() * problem.sigma());

  Matrix per_sample = Matrix::Zero(n_s, n_d);
  std::vector<char> failed(static_cast<std::size_t>(n_d), 0);
  par::parallel_for(n_d, [&](Index i) {
    try {
      const MapSolveResult solved =
          map_solve(problem, training.data.col(i), w, std::nullopt, options);
      const LaplacePosterior laplace(problem, w, solved.m_map);
      const Vector residual =
          problem.forward().apply(solved.m_map) - training.data.col(i);
      const Vector q =
          laplace.solve_hessian_dense(solved.m_map - training.params.col(i));
      per_sample.col(i) =
          -2.0 * inv_var * residual.cwiseProduct(laplace.jacobian() * q);
    } catch (const SolverError&) {
      failed[static_cast<std::size_t>(i)] = 1;
    }
  });

  Index n_ok = 0;
  Vector gradient = Vector::Zero(n_s);
  for (Index i = 0; i < n_d; ++i) {
    if (failed[static_cast<std::size_t>(i)]) continue;
    gradient += per_sample.col(i);
    ++n_ok;
  }
  if (n_ok * 10 < n_d * 9) {
    throw SolverError("grad_bayes_risk_saa: more than 10% of the MAP solves failed");
  }
  return gradient / static_cast<double>(n_ok);
}

}  // namespace oed::nonlinear
