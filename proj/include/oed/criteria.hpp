// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "oed/posterior.hpp"

namespace oed {

/// Which design criterion to evaluate. The c-criterion carries the functional
/// direction; it may come from a prediction linearization c = p'(m0).
struct CriterionSpec {
  enum class Kind { A, C, D };

  Kind kind = Kind::A;
  Vector c_vector;

  static CriterionSpec a() { return {Kind::A, {}}; }
  static CriterionSpec d() { return {Kind::D, {}}; }
  static CriterionSpec c(Vector direction) {
    return {Kind::C, std::move(direction)};
  }

  void validate(Index n_param) const {
    if (kind == Kind::C) {
      require(c_vector.size() == n_param,
              "CriterionSpec: c_vector must be present with the parameter "
              "dimension for the c-criterion");
    } else {
      require(c_vector.size() == 0,
              "CriterionSpec: c_vector only applies to the c-criterion");
    }
  }
};

enum class EstimatorRoute {
  ExactDense,
  MonteCarlo,
  SubspaceIteration,
  MeasurementSpace,
  AdjointFree,
};

enum class ProbeDistribution { Rademacher, Gaussian };

struct EstimatorConfig {
  EstimatorRoute route = EstimatorRoute::MeasurementSpace;
  int n_mc = 100;                 // Monte Carlo probe count
  Index ell = 20;                 // sketch size
  int q = 1;                      // subspace iteration power
  Index r = 20;                   // prior rank for the adjoint-free route
  std::uint64_t seed = 0;
  ProbeDistribution probe = ProbeDistribution::Rademacher;

  void validate() const {
    require(n_mc >= 1, "EstimatorConfig: n_mc must be >= 1");
    require(ell >= 1, "EstimatorConfig: ell must be >= 1");
    require(q >= 1, "EstimatorConfig: q must be >= 1");
    require(r >= 1, "EstimatorConfig: r must be >= 1");
  }
};

/// Output of the randomized subspace iteration: T = Q^T A Q with Q an
/// orthonormal basis of A^q Omega. When A^q Omega is numerically
/// rank-deficient the basis is shrunk to the detected rank.
struct SketchResult {
  Matrix t;             // ell_eff x ell_eff, symmetric
  Matrix basis;         // n x ell_eff
  Index ell_requested = 0;
  Index ell_effective = 0;
  double t_asymmetry = 0.0;

  double trace() const { return t.trace(); }
  double logdet_i_plus() const;
};

/// Per-call estimator bookkeeping surfaced in run reports.
struct EstimatorDiagnostics {
  std::string route;
  double value = 0.0;
  double mc_standard_error = 0.0;
  int mc_samples = 0;
  Vector sketch_eigenvalues;
  Index sketch_rank = 0;
};

/// Randomized subspace iteration for a symmetric positive semidefinite
/// operator given by its action. Deterministic for a given seed; columns of
/// the test matrix are drawn from per-column substreams.
SketchResult subspace_iteration(
    const std::function<Vector(const Vector&)>& apply_op, Index n, Index ell,
    int q, std::uint64_t seed);

/// Euclidean-symmetric action of the prior-preconditioned data-misfit Hessian
/// sigma^{-2} L^T F^T W F L, which shares the spectrum of
/// sigma^{-2} C^{1/2} F* W F C^{1/2}.
std::function<Vector(const Vector&)> prior_preconditioned_hessian(
    const BayesianLinearProblem& problem, const DesignVector& w);

/// A-optimality tr(Gamma_post(w)). Routes: ExactDense (oracle), MonteCarlo
/// (mass-weighted Hutchinson probes), MeasurementSpace
/// (tr(C_pr) minus the measurement-space correction).
double phi_A(const BayesianLinearProblem& problem, const DesignVector& w,
             const EstimatorConfig& config = {},
             EstimatorDiagnostics* diagnostics = nullptr);

/// c-optimality <Gamma_post(w) c, c>_M; exact up to solver tolerance.
double phi_c(const BayesianLinearProblem& problem, const DesignVector& w,
             const Vector& c);

/// D-optimality -logdet(I + Htilde(w)). Routes: ExactDense,
/// MeasurementSpace (Sylvester form on the cached n_s x n_s matrix),
/// SubspaceIteration (-logdet(I + T)), AdjointFree (rank config.r).
double phi_D(const BayesianLinearProblem& problem, const DesignVector& w,
             const EstimatorConfig& config = {},
             EstimatorDiagnostics* diagnostics = nullptr);

/// Adjoint-free D-criterion from a rank-r prior eigendecomposition; uses r
/// forward applies and no adjoint solves.
double phi_D_adjoint_free(const BayesianLinearProblem& problem,
                          const DesignVector& w, Index r,
                          EstimatorDiagnostics* diagnostics = nullptr);

/// Gradient of the chosen criterion with respect to the design weights.
/// Closed forms derived from the weight-dependent posterior:
///   dPhi_c/dw_i = -sigma^{-2} (e_i^T F G c)^2,
///   dPhi_A/dw_i = -sigma^{-2} ||G F* e_i||_M^2,
///   dPhi_D/dw_i = -sigma^{-2} e_i^T F G F* e_i,
/// with G = Gamma_post(w).
Vector grad_phi(const BayesianLinearProblem& problem, const DesignVector& w,
                const CriterionSpec& spec, const EstimatorConfig& config = {});

/// Criterion dispatch used by the optimizers.
double evaluate_criterion(const BayesianLinearProblem& problem,
                          const DesignVector& w, const CriterionSpec& spec,
                          const EstimatorConfig& config = {});

/// Closed-form KL divergence between dense Gaussians (test and diagnostics
/// utility; covariances in a fixed orthonormal basis).
double kl_gaussian_dense(const Vector& mean1, const Matrix& cov1,
                         const Vector& mean2, const Matrix& cov2);

}  // namespace oed
