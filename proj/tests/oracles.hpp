// SPDX-License-Identifier: Apache-2.0
//
// Dense reference computations for the test suites. Everything here goes
// through plain Eigen dense algebra so it stays independent of the
// matrix-free solver paths it is used to check.
#pragma once

#include <Eigen/Dense>
#include <functional>

#include "oed/mass.hpp"
#include "oed/posterior.hpp"
#include "oed/prior.hpp"
#include "oed/space.hpp"

namespace oracle {

using oed::Index;
using oed::Matrix;
using oed::Vector;

/// M-weighted adjoint of a dense matrix between parameter spaces.
inline Matrix m_adjoint_dense(const Matrix& a, const Vector& mass_diag) {
  return mass_diag.cwiseInverse().asDiagonal() * a.transpose() *
         mass_diag.asDiagonal();
}

/// Dense picture of a linear-Gaussian problem. All members are plain dense
/// matrices assembled once; the criteria below are textbook formulas.
struct DenseProblem {
  Matrix forward;     // n_s x n
  Matrix cov_op;      // covariance operator action, n x n
  Matrix precision;   // its inverse
  Vector mass_diag;   // lumped mass
  double sigma = 1.0;

  static DenseProblem from(const oed::BayesianLinearProblem& problem) {
    DenseProblem dense;
    dense.forward = oed::dense_assemble(problem.forward());
    dense.cov_op = oed::dense_assemble(problem.prior().cov_operator());
    dense.precision = dense.cov_op.inverse();
    dense.mass_diag = problem.mass().diag();
    dense.sigma = problem.sigma();
    return dense;
  }

  Index n() const { return cov_op.rows(); }
  Index n_s() const { return forward.rows(); }

  /// Euclidean coefficient covariance Sigma = C M^{-1}.
  Matrix coefficient_cov() const {
    return cov_op * mass_diag.cwiseInverse().asDiagonal();
  }

  /// Posterior covariance operator (sigma^{-2} F* W F + C^{-1})^{-1} with
  /// F* = M^{-1} F^T.
  Matrix posterior_cov_op(const Vector& w) const {
    const double inv_var = 1.0 / (sigma * sigma);
    const Matrix h = inv_var * mass_diag.cwiseInverse().asDiagonal() *
                         forward.transpose() * w.asDiagonal() * forward +
                     precision;
    return h.inverse();
  }

  Vector map_point(const Vector& w, const Vector& y, const Vector& mean) const {
    const double inv_var = 1.0 / (sigma * sigma);
    const Vector rhs = inv_var * mass_diag.cwiseInverse().asDiagonal() *
                           forward.transpose() * w.cwiseProduct(y) +
                       precision * mean;
    return posterior_cov_op(w) * rhs;
  }

  double phi_a(const Vector& w) const { return posterior_cov_op(w).trace(); }

  double phi_c(const Vector& w, const Vector& c) const {
    const Vector gc = posterior_cov_op(w) * c;
    return gc.dot(mass_diag.cwiseProduct(c));
  }

  double phi_d(const Vector& w) const {
    const double inv_var = 1.0 / (sigma * sigma);
    const Matrix x = forward * coefficient_cov() * forward.transpose();
    const Vector sqrt_w = w.cwiseSqrt();
    const Matrix inner = Matrix::Identity(x.rows(), x.cols()) +
                         inv_var * sqrt_w.asDiagonal() * x * sqrt_w.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (inner + inner.transpose()));
    return -eig.eigenvalues().array().log().sum();
  }
};

/// Central finite differences, the gradient oracle.
inline Vector fd_gradient(const std::function<double(const Vector&)>& fn,
                          const Vector& w, double h = 1e-5) {
  Vector grad(w.size());
  for (Index i = 0; i < w.size(); ++i) {
    Vector lo = w, hi = w;
    lo[i] -= h;
    hi[i] += h;
    grad[i] = (fn(hi) - fn(lo)) / (2.0 * h);
  }
  return grad;
}

}  // namespace oracle
