// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/LU>
#include <memory>
#include <mutex>

#include "oed/pcg.hpp"
#include "oed/prior.hpp"
#include "oed/space.hpp"

namespace oed {

/// Relaxed sensor weights w in [0,1]^{n_s}.
class DesignVector {
public:
  DesignVector() = default;
  explicit DesignVector(Vector w) : w_(std::move(w)) {
    require((w_.array() >= 0.0).all() && (w_.array() <= 1.0).all(),
            "DesignVector: weights must lie in [0, 1]");
  }

  static DesignVector zeros(Index n) { return DesignVector(Vector::Zero(n)); }
  static DesignVector ones(Index n) { return DesignVector(Vector::Ones(n)); }

  Index size() const { return w_.size(); }
  const Vector& weights() const { return w_; }
  double operator[](Index i) const { return w_[i]; }

  /// Indices with weight above `tol`.
  std::vector<Index> active_set(double tol = 1e-8) const {
    std::vector<Index> active;
    for (Index i = 0; i < w_.size(); ++i) {
      if (w_[i] > tol) active.push_back(i);
    }
    return active;
  }
  Index n_active(double tol = 1e-8) const {
    return static_cast<Index>(active_set(tol).size());
  }

private:
  Vector w_;
};

/// Measurement-space objects that do not depend on the design weights:
/// P = C F^T (columns C F* e_i), X = F C F*, Y = F C^2 F* = P^T M P.
/// Built once per problem and reused across designs.
struct MeasurementSpaceCache {
  Matrix p;  // n x n_s
  Matrix x;  // n_s x n_s, symmetric
  Matrix y;  // n_s x n_s, symmetric
  double x_asymmetry = 0.0;
};

/// Linear Bayesian inverse problem with Gaussian prior, Gaussian noise
/// Gamma_noise = sigma^2 I, and a weighted likelihood over n_s candidate
/// sensors.
class BayesianLinearProblem {
public:
  BayesianLinearProblem(LinearOperatorHandle forward,
                        std::shared_ptr<const GaussianPrior> prior,
                        double sigma);

  const LinearOperatorHandle& forward() const { return forward_; }
  const GaussianPrior& prior() const { return *prior_; }
  std::shared_ptr<const GaussianPrior> prior_ptr() const { return prior_; }
  double sigma() const { return sigma_; }
  Index n_param() const { return forward_.domain().dim(); }
  Index n_sensors() const { return forward_.codomain().dim(); }
  const MassMatrix& mass() const { return prior_->mass(); }

  /// F* d = M^{-1} F^T d.
  Vector adjoint_apply(const Vector& d) const {
    return m_adjoint_apply(forward_, d);
  }

  /// Cache of measurement-space matrices; built on first use under
  /// single-writer initialization (symmetrization guard 1e-8).
  const MeasurementSpaceCache& measurement_cache() const;

  /// tr(C_pr), forwarded to the prior (cached there).
  double prior_trace() const { return prior_->trace_cov(); }

private:
  LinearOperatorHandle forward_;
  std::shared_ptr<const GaussianPrior> prior_;
  double sigma_;

  mutable std::once_flag cache_once_;
  mutable MeasurementSpaceCache cache_;
};

struct PosteriorOptions {
  PcgOptions pcg;        // tolerances of the covariance-apply solves
  bool use_smw = false;  // route map_point/apply through the SMW form
};

/// Weight-dependent linear-Gaussian posterior
/// Gamma_post(w) = (sigma^{-2} F* W F + C_pr^{-1})^{-1}, as an operator on the
/// mass-weighted parameter space. Immutable given (problem, w); applies are
/// safe to call concurrently.
class LinearGaussianPosterior {
public:
  LinearGaussianPosterior(std::shared_ptr<const BayesianLinearProblem> problem,
                          DesignVector w, PosteriorOptions options = {});

  const BayesianLinearProblem& problem() const { return *problem_; }
  const DesignVector& design() const { return w_; }
  const PosteriorOptions& options() const { return options_; }

  /// Hessian action H v = sigma^{-2} F* W F v + C_pr^{-1} v.
  Vector apply_hessian(const Vector& v) const;

  /// Gamma_post v by prior-preconditioned conjugate gradients.
  Vector apply_post_cov(const Vector& v, PcgInfo* info = nullptr) const;

  /// Gamma_post v by the Sherman-Morrison-Woodbury measurement-space route:
  /// C v - sigma^{-2} C F* (I + sigma^{-2} W F C F*)^{-1} W F C v.
  Vector apply_post_cov_smw(const Vector& v) const;

  /// MAP point Gamma_post (sigma^{-2} F* W y + C_pr^{-1} m_pr).
  Vector map_point(const Vector& y) const;

  /// Factorized (I + sigma^{-2} W X); shared by the SMW apply and the
  /// criterion/gradient formulas.
  const Eigen::PartialPivLU<Matrix>& inner_lu() const { return inner_lu_; }

  LinearOperatorHandle cov_operator() const;

private:
  std::shared_ptr<const BayesianLinearProblem> problem_;
  DesignVector w_;
  PosteriorOptions options_;
  Eigen::PartialPivLU<Matrix> inner_lu_;
};

}  // namespace oed
