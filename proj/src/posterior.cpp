// SPDX-License-Identifier: Apache-2.0
#include "oed/posterior.hpp"

#include <cmath>
#include <string>

namespace oed {

BayesianLinearProblem::BayesianLinearProblem(
    LinearOperatorHandle forward, std::shared_ptr<const GaussianPrior> prior,
    double sigma)
    : forward_(std::move(forward)), prior_(std::move(prior)), sigma_(sigma) {
  require(prior_ != nullptr, "BayesianLinearProblem: prior is required");
  require(sigma_ > 0.0, "BayesianLinearProblem: sigma must be > 0");
  require(forward_.domain().is_parameter(),
          "BayesianLinearProblem: forward domain must be the parameter space");
  require(!forward_.codomain().is_parameter(),
          "BayesianLinearProblem: forward codomain must be Euclidean data");
  require(forward_.domain().dim() == prior_->dim(),
          "BayesianLinearProblem: forward/prior dimension mismatch");
  require(forward_.has_transpose(),
          "BayesianLinearProblem: forward must declare apply_transpose");
}

const MeasurementSpaceCache& BayesianLinearProblem::measurement_cache() const {
  std::call_once(cache_once_, [this] {
    const Index n_s = n_sensors();
    cache_.p.resize(n_param(), n_s);
    Vector basis = Vector::Zero(n_s);
    for (Index j = 0; j < n_s; ++j) {
      basis[j] = 1.0;
      cache_.p.col(j) = prior_->apply_cov(adjoint_apply(basis));
      basis[j] = 0.0;
    }
    Matrix x(n_s, n_s);
    for (Index j = 0; j < n_s; ++j) x.col(j) = forward_.apply(cache_.p.col(j));
    cache_.x_asymmetry = (x - x.transpose()).cwiseAbs().maxCoeff();
    const double scale = 1.0 + x.cwiseAbs().maxCoeff();
    if (cache_.x_asymmetry > 1e-8 * scale) {
      throw SolverError(
          "measurement_cache: F C_pr F* failed the symmetry guard (asymmetry " +
          std::to_string(cache_.x_asymmetry) + ")");
    }
    cache_.x = 0.5 * (x + x.transpose());
    cache_.y = cache_.p.transpose() *
               prior_->mass().diag().asDiagonal() * cache_.p;
    cache_.y = 0.5 * (cache_.y + cache_.y.transpose()).eval();
  });
  return cache_;
}

LinearGaussianPosterior::LinearGaussianPosterior(
    std::shared_ptr<const BayesianLinearProblem> problem, DesignVector w,
    PosteriorOptions options)
    : problem_(std::move(problem)), w_(std::move(w)), options_(options) {
  require(problem_ != nullptr, "LinearGaussianPosterior: problem is required");
  require(w_.size() == problem_->n_sensors(),
          "LinearGaussianPosterior: design size mismatch");
  const MeasurementSpaceCache& cache = problem_->measurement_cache();
  const double inv_var = 1.0 / (problem_->sigma() * problem_->sigma());
  const Matrix inner = Matrix::Identity(w_.size(), w_.size()) +
                       inv_var * w_.weights().asDiagonal() * cache.x;
  inner_lu_.compute(inner);
}

Vector LinearGaussianPosterior::apply_hessian(const Vector& v) const {
  const double inv_var = 1.0 / (problem_->sigma() * problem_->sigma());
  const Vector weighted = w_.weights().cwiseProduct(problem_->forward().apply(v));
  return inv_var * problem_->adjoint_apply(weighted) +
         problem_->prior().apply_precision(v);
}

Vector LinearGaussianPosterior::apply_post_cov(const Vector& v,
                                               PcgInfo* info) const {
  require(v.size() == problem_->n_param(), "apply_post_cov: dimension mismatch");
  if (options_.use_smw) return apply_post_cov_smw(v);
  return pcg(
      [this](const Vector& z) { return apply_hessian(z); },
      [this](const Vector& r) { return problem_->prior().apply_cov(r); }, v,
      problem_->mass(), options_.pcg, info);
}

Vector LinearGaussianPosterior::apply_post_cov_smw(const Vector& v) const {
  require(v.size() == problem_->n_param(),
          "apply_post_cov_smw: dimension mismatch");
  const MeasurementSpaceCache& cache = problem_->measurement_cache();
  const double inv_var = 1.0 / (problem_->sigma() * problem_->sigma());
  const Vector cov_v = problem_->prior().apply_cov(v);
  const Vector data = problem_->forward().apply(cov_v);
  const Vector correction =
      inner_lu_.solve(w_.weights().cwiseProduct(data));
  if (!correction.allFinite()) {
    throw SolverError("apply_post_cov_smw: inner measurement-space solve failed");
  }
  return cov_v - inv_var * (cache.p * correction);
}

Vector LinearGaussianPosterior::map_point(const Vector& y) const {
  require(y.size() == problem_->n_sensors(), "map_point: data dimension mismatch");
  const double inv_var = 1.0 / (problem_->sigma() * problem_->sigma());
  const Vector rhs =
      inv_var * problem_->adjoint_apply(w_.weights().cwiseProduct(y)) +
      problem_->prior().apply_precision(problem_->prior().mean());
  return apply_post_cov(rhs);
}

LinearOperatorHandle LinearGaussianPosterior::cov_operator() const {
  const MassMatrix& mass = problem_->mass();
  return LinearOperatorHandle(
      SpaceTag::parameter(mass), SpaceTag::parameter(mass),
      [this](const Vector& v) { return apply_post_cov(v); },
      [this, &mass](const Vector& v) {
        return mass.apply(apply_post_cov(mass.apply_inv(v)));
      });
}

}  // namespace oed
