// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <mutex>
#include <optional>

#include "oed/nonlinear/seird.hpp"
#include "oed/pcg.hpp"
#include "oed/posterior.hpp"
#include "oed/prior.hpp"

namespace oed::nonlinear {

/// Nonlinear parameter-to-observable map with dense Jacobian assembly at a
/// point. Parameter dimensions stay small enough at desk scale that dense
/// Jacobians are the natural representation.
class NonlinearForwardMap {
public:
  virtual ~NonlinearForwardMap() = default;
  virtual Index n_param() const = 0;
  virtual Index n_data() const = 0;
  virtual Vector apply(const Vector& m) const = 0;
  virtual Matrix jacobian(const Vector& m) const = 0;
};

/// Linear map plugged into the nonlinear machinery (Laplace approximation is
/// exact in this case, which the tests exploit).
class LinearForwardMap final : public NonlinearForwardMap {
public:
  explicit LinearForwardMap(Matrix forward) : forward_(std::move(forward)) {}
  static std::shared_ptr<LinearForwardMap> from_operator(
      const LinearOperatorHandle& op) {
    return std::make_shared<LinearForwardMap>(dense_assemble(op));
  }

  Index n_param() const override { return forward_.cols(); }
  Index n_data() const override { return forward_.rows(); }
  Vector apply(const Vector& m) const override { return forward_ * m; }
  Matrix jacobian(const Vector&) const override { return forward_; }

private:
  Matrix forward_;
};

/// SEIRD observations of infected counts at fixed candidate times, with the
/// stacked parameter (log beta nodes, log sigma_e, log gamma_rec,
/// log delta_mort) inverted in log space to keep the rates positive.
class SeirdLogForwardMap final : public NonlinearForwardMap {
public:
  SeirdLogForwardMap(SeirdModel model, Vector candidate_times)
      : model_(std::move(model)), times_(std::move(candidate_times)) {
    require(times_.size() >= 1, "SeirdLogForwardMap: need observation times");
  }

  const SeirdModel& model() const { return model_; }
  const Vector& candidate_times() const { return times_; }

  Index n_param() const override { return model_.n_raw(); }
  Index n_data() const override { return times_.size(); }

  static SeirdRawParams to_raw(const SeirdModel& model, const Vector& m) {
    SeirdRawParams raw;
    raw.beta_nodes = m.head(model.n_beta()).array().exp();
    raw.sigma_e = std::exp(m[model.n_beta()]);
    raw.gamma_rec = std::exp(m[model.n_beta() + 1]);
    raw.delta_mort = std::exp(m[model.n_beta() + 2]);
    return raw;
  }

  Vector apply(const Vector& m) const override {
    require(m.size() == n_param(), "SeirdLogForwardMap: dimension mismatch");
    return model_.observe_infected(to_raw(model_, m), times_);
  }

  Matrix jacobian(const Vector& m) const override {
    require(m.size() == n_param(), "SeirdLogForwardMap: dimension mismatch");
    Matrix raw_sensitivity;
    model_.observe_infected(to_raw(model_, m), times_, &raw_sensitivity);
    // Chain rule through the exponential reparameterization.
    return raw_sensitivity * m.array().exp().matrix().asDiagonal();
  }

private:
  SeirdModel model_;
  Vector times_;
};

/// Tangent action J(m) v of a forward map at a point.
inline Vector jacobian_apply(const NonlinearForwardMap& forward,
                             const Vector& m, const Vector& direction) {
  require(direction.size() == forward.n_param(),
          "jacobian_apply: direction size mismatch");
  return forward.jacobian(m) * direction;
}

/// M-weighted adjoint action J(m)* d = M^{-1} J^T d.
inline Vector jacobian_adjoint_apply(const NonlinearForwardMap& forward,
                                     const MassMatrix& mass, const Vector& m,
                                     const Vector& data) {
  require(data.size() == forward.n_data(),
          "jacobian_adjoint_apply: data size mismatch");
  return mass.apply_inv(forward.jacobian(m).transpose() * data);
}

/// Bayesian nonlinear inverse problem over the candidate observation set.
class NonlinearProblem {
public:
  NonlinearProblem(std::shared_ptr<const NonlinearForwardMap> forward,
                   std::shared_ptr<const GaussianPrior> prior, double sigma);

  const NonlinearForwardMap& forward() const { return *forward_; }
  const GaussianPrior& prior() const { return *prior_; }
  double sigma() const { return sigma_; }
  Index n_param() const { return forward_->n_param(); }
  Index n_candidates() const { return forward_->n_data(); }
  const MassMatrix& mass() const { return prior_->mass(); }

  /// Dense precision operator matrix, assembled once (desk-scale guard).
  const Matrix& dense_precision() const;

private:
  std::shared_ptr<const NonlinearForwardMap> forward_;
  std::shared_ptr<const GaussianPrior> prior_;
  double sigma_;

  mutable std::once_flag precision_once_;
  mutable Matrix precision_;
};

struct MapSolveOptions {
  double gradient_rtol = 1e-8;
  double gradient_atol = 1e-12;
  int max_iterations = 50;
  int max_backtracks = 40;
  double armijo_c = 1e-4;
};

struct MapSolveResult {
  Vector m_map;
  int iterations = 0;
  double gradient_norm = 0.0;
  double cost = 0.0;
};

/// Weighted MAP estimate: inexact Gauss-Newton with Armijo line search on the
/// negative log-posterior; terminates when the M-norm of the cost gradient
/// falls below gradient_rtol times its initial value. Throws SolverError on
/// line-search failure (message carries the iteration and gradient norm of
/// the last iterate).
MapSolveResult map_solve(const NonlinearProblem& problem, const Vector& y,
                         const DesignVector& w,
                         std::optional<Vector> m0 = std::nullopt,
                         const MapSolveOptions& options = {});

/// Prior draws with synthetic data y_i = f(m_i) + eta_i; reproducible from
/// the root seed via labeled substreams.
struct TrainingSet {
  Matrix params;  // n_param x n_d
  Matrix data;    // n_candidates x n_d
  std::uint64_t root_seed = 0;

  Index size() const { return params.cols(); }

  static TrainingSet draw(const NonlinearProblem& problem, Index n_d,
                          std::uint64_t root_seed);
};

/// Gauss-Newton Laplace surrogate at the MAP point: Gaussian with covariance
/// H^{-1}, H = sigma^{-2} J* W J + C_pr^{-1}.
class LaplacePosterior {
public:
  LaplacePosterior(const NonlinearProblem& problem, const DesignVector& w,
                   Vector m_map);

  const Vector& map_point() const { return m_map_; }

  Vector apply_hessian(const Vector& v) const;
  /// H^{-1} v by preconditioned CG in the M-inner product (prior covariance
  /// preconditioner).
  Vector solve_hessian(const Vector& v, const PcgOptions& options = {}) const;
  /// H^{-1} v through the cached dense factorization.
  Vector solve_hessian_dense(const Vector& v) const;
  /// tr(H^{-1}) by dense inversion (parameter dimension is small at desk
  /// scale).
  double trace_inverse() const;

  const Matrix& jacobian() const { return jacobian_; }

private:
  const NonlinearProblem& problem_;
  DesignVector w_;
  Vector m_map_;
  Matrix jacobian_;
  Matrix weighted_hessian_;  // M H, symmetric positive definite
  Eigen::LLT<Matrix> hessian_llt_;
};

struct SampleAverageResult {
  double value = 0.0;
  double standard_error = 0.0;
  Vector per_sample;
  Index n_failed = 0;
};

/// Sample-average Bayes risk (1/n_d) sum ||m_MAP(y_i, w) - m_i||_M^2 over the
/// training set. MAP failures are skipped and flagged; more than 10% failures
/// is an error. The n_d MAP solves run concurrently.
SampleAverageResult bayes_risk_saa(const NonlinearProblem& problem,
                                   const DesignVector& w,
                                   const TrainingSet& training,
                                   const MapSolveOptions& options = {});

/// Convenience overload drawing the training set from seeds.
SampleAverageResult bayes_risk_saa(const NonlinearProblem& problem,
                                   const DesignVector& w, Index n_d,
                                   std::uint64_t root_seed,
                                   const MapSolveOptions& options = {});

struct LaplaceTraceConfig {
  bool monte_carlo = false;  // dense inverse by default at desk scale
  int n_mc = 64;
  std::uint64_t seed = 0;
};

/// Laplace A-criterion: sample average of tr(H^{-1}) at the per-sample MAP
/// points.
SampleAverageResult psi_A_gaussian(const NonlinearProblem& problem,
                                   const DesignVector& w,
                                   const TrainingSet& training,
                                   const LaplaceTraceConfig& trace = {},
                                   const MapSolveOptions& options = {});

/// Laplace c-criterion: sample average of <H^{-1} c, c>_M with the Hessian
/// systems solved by CG.
SampleAverageResult psi_c_gaussian(const NonlinearProblem& problem,
                                   const DesignVector& w,
                                   const TrainingSet& training, const Vector& c,
                                   const MapSolveOptions& options = {});

/// Gradient of the sample-average Bayes risk with respect to the design
/// weights, via implicit differentiation of the MAP optimality condition with
/// the Gauss-Newton Hessian:
///   dPsi/dw_j = -(2 sigma^{-2}/n_d) sum_i r_j (J q)_j,
///   q = H^{-1}(m_MAP - m_i), r = f(m_MAP) - y_i.
/// Approximate to the extent Gauss-Newton drops second-order terms.
Vector grad_bayes_risk_saa(const NonlinearProblem& problem,
                           const DesignVector& w, const TrainingSet& training,
                           const MapSolveOptions& options = {});

}  // namespace oed::nonlinear
