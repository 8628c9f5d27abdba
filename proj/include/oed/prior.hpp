// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cstdint>
#include <memory>
#include <mutex>

#include "oed/space.hpp"

namespace oed {

/// Gaussian prior interface on the mass-weighted parameter space.
///
/// Conventions: all covariance-like quantities act as operators on
/// (R^n, <.,.>_M). The coefficient vector of a draw has Euclidean covariance
/// Sigma = C M^{-1} where C is the covariance operator applied by apply_cov,
/// and apply_sqrt_cov is a factor L with L L^T = Sigma, so
/// sample = mean + L xi with xi standard normal.
class GaussianPrior {
public:
  virtual ~GaussianPrior() = default;

  virtual Index dim() const = 0;
  virtual const Vector& mean() const = 0;
  virtual const MassMatrix& mass() const = 0;

  /// Covariance operator action C v.
  virtual Vector apply_cov(const Vector& v) const = 0;
  /// Precision operator action C^{-1} v.
  virtual Vector apply_precision(const Vector& v) const = 0;
  /// Sampling factor action L x (x Euclidean-standard-normal shaped).
  virtual Vector apply_sqrt_cov(const Vector& x) const = 0;
  /// Plain transpose L^T v of the sampling factor; together with
  /// apply_sqrt_cov this exposes the prior-preconditioned operator
  /// L^T B L used by the randomized estimators.
  virtual Vector apply_sqrt_cov_transpose(const Vector& v) const = 0;

  /// Operator trace tr(C); cached after the first call.
  double trace_cov() const;

  /// mean + L xi; deterministic for a given seed.
  Vector sample(std::uint64_t seed) const;

  /// Covariance as an operator handle (for adjoint verification and dense
  /// oracles). apply_transpose uses (C)^T = M C M^{-1}, which follows from
  /// M-self-adjointness.
  LinearOperatorHandle cov_operator() const;

protected:
  virtual double compute_trace_cov() const;

private:
  mutable std::once_flag trace_once_;
  mutable double trace_ = 0.0;
};

/// Gaussian prior whose covariance is defined through the inverse of the
/// discretized elliptic operator A = delta M + gamma K, with K a stiffness
/// matrix with no-flux boundaries. The covariance operator is
/// C = A^{-1} M A^{-1} M and the sampling factor is L = A^{-1} M^{1/2}
/// (so the Euclidean coefficient covariance is A^{-1} M A^{-1}).
///
/// gamma controls the correlation length and delta the pointwise variance;
/// both solves go through a cached sparse Cholesky factorization.
class EllipticGaussianPrior final : public GaussianPrior {
public:
  EllipticGaussianPrior(Eigen::SparseMatrix<double> a_op, MassMatrix mass,
                        Vector mean, double gamma, double delta);

  /// Prior on a 2D cell-centered nx-by-ny grid over
  /// [0, length_x] x [0, length_y].
  static std::shared_ptr<EllipticGaussianPrior> make_2d(
      Index nx, Index ny, double length_x, double length_y, double gamma,
      double delta, const Vector& mean);

  /// Prior on a 1D grid of n nodes with spacing length/(n-1).
  static std::shared_ptr<EllipticGaussianPrior> make_1d(Index n, double length,
                                                        double gamma,
                                                        double delta,
                                                        const Vector& mean);

  /// Block prior: an elliptic 1D block for a gridded function stacked with
  /// independent scalar log-parameters of the given standard deviations.
  static std::shared_ptr<EllipticGaussianPrior> make_1d_with_scalars(
      Index n_grid, double length, double gamma, double delta,
      const Vector& scalar_sigmas, const Vector& mean);

  Index dim() const override { return mass_.n(); }
  const Vector& mean() const override { return mean_; }
  const MassMatrix& mass() const override { return mass_; }

  Vector apply_cov(const Vector& v) const override;
  Vector apply_precision(const Vector& v) const override;
  Vector apply_sqrt_cov(const Vector& x) const override;
  Vector apply_sqrt_cov_transpose(const Vector& v) const override;

  double gamma() const { return gamma_; }
  double delta() const { return delta_; }
  const Eigen::SparseMatrix<double>& a_op() const { return a_op_; }

  /// Solves A z = v with the cached factorization.
  Vector solve_a(const Vector& v) const;

protected:
  double compute_trace_cov() const override;

private:
  Eigen::SparseMatrix<double> a_op_;
  MassMatrix mass_;
  Vector mean_;
  double gamma_;
  double delta_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> a_solver_;
};

/// Dense Gaussian prior for toy problems and oracles. Constructed from the
/// covariance operator matrix C (M C must be symmetric positive definite).
class DenseGaussianPrior final : public GaussianPrior {
public:
  DenseGaussianPrior(Matrix cov_operator, MassMatrix mass, Vector mean);

  /// Convenience: independent pointwise variances on a Euclidean space.
  static std::shared_ptr<DenseGaussianPrior> diagonal(const Vector& variances);

  Index dim() const override { return mass_.n(); }
  const Vector& mean() const override { return mean_; }
  const MassMatrix& mass() const override { return mass_; }

  Vector apply_cov(const Vector& v) const override;
  Vector apply_precision(const Vector& v) const override;
  Vector apply_sqrt_cov(const Vector& x) const override;
  Vector apply_sqrt_cov_transpose(const Vector& v) const override;

  const Matrix& cov_matrix() const { return cov_; }

protected:
  double compute_trace_cov() const override { return cov_.trace(); }

private:
  Matrix cov_;               // operator action matrix
  MassMatrix mass_;
  Vector mean_;
  Matrix sqrt_factor_;       // L with L L^T = C M^{-1}
  Eigen::LLT<Matrix> weighted_llt_;  // factorization of M C
};

}  // namespace oed
