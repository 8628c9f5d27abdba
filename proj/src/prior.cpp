// SPDX-License-Identifier: Apache-2.0
#include "oed/prior.hpp"

#include <cmath>
#include <vector>

#include "oed/random.hpp"

namespace oed {

namespace {

using Triplet = Eigen::Triplet<double>;

/// Stiffness of the negative Laplacian with no-flux boundaries on a
/// cell-centered 2D grid, scaled so that K ~ M (-Delta_h).
Eigen::SparseMatrix<double> stiffness_2d(Index nx, Index ny, double hx,
                                         double hy) {
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(5 * nx * ny));
  auto cell = [nx](Index i, Index j) { return j * nx + i; };
  const double wx = hy / hx;  // face length over center distance
  const double wy = hx / hy;
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const Index p = cell(i, j);
      if (i + 1 < nx) {
        const Index q = cell(i + 1, j);
        triplets.emplace_back(p, p, wx);
        triplets.emplace_back(q, q, wx);
        triplets.emplace_back(p, q, -wx);
        triplets.emplace_back(q, p, -wx);
      }
      if (j + 1 < ny) {
        const Index q = cell(i, j + 1);
        triplets.emplace_back(p, p, wy);
        triplets.emplace_back(q, q, wy);
        triplets.emplace_back(p, q, -wy);
        triplets.emplace_back(q, p, -wy);
      }
    }
  }
  Eigen::SparseMatrix<double> k(nx * ny, nx * ny);
  k.setFromTriplets(triplets.begin(), triplets.end());
  return k;
}

Eigen::SparseMatrix<double> stiffness_1d(Index n, double h) {
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(3 * n));
  for (Index i = 0; i + 1 < n; ++i) {
    const double w = 1.0 / h;
    triplets.emplace_back(i, i, w);
    triplets.emplace_back(i + 1, i + 1, w);
    triplets.emplace_back(i, i + 1, -w);
    triplets.emplace_back(i + 1, i, -w);
  }
  Eigen::SparseMatrix<double> k(n, n);
  k.setFromTriplets(triplets.begin(), triplets.end());
  return k;
}

}  // namespace

double GaussianPrior::trace_cov() const {
  std::call_once(trace_once_, [this] { trace_ = compute_trace_cov(); });
  return trace_;
}

double GaussianPrior::compute_trace_cov() const {
  // Operator trace is basis independent; sum the diagonal of the action
  // matrix. Derived classes override with cheaper routes where available.
  const Index n = dim();
  double total = 0.0;
  Vector basis = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    basis[i] = 1.0;
    total += apply_cov(basis)[i];
    basis[i] = 0.0;
  }
  return total;
}

Vector GaussianPrior::sample(std::uint64_t seed) const {
  rng::Engine engine(rng::substream(seed, "prior-sample"));
  return mean() + apply_sqrt_cov(rng::standard_normal(dim(), engine));
}

LinearOperatorHandle GaussianPrior::cov_operator() const {
  const MassMatrix& m = mass();
  return LinearOperatorHandle(
      SpaceTag::parameter(m), SpaceTag::parameter(m),
      [this](const Vector& v) { return apply_cov(v); },
      [this, &m](const Vector& v) {
        return m.apply(apply_cov(m.apply_inv(v)));
      });
}

EllipticGaussianPrior::EllipticGaussianPrior(Eigen::SparseMatrix<double> a_op,
                                             MassMatrix mass, Vector mean,
                                             double gamma, double delta)
    : a_op_(std::move(a_op)),
      mass_(std::move(mass)),
      mean_(std::move(mean)),
      gamma_(gamma),
      delta_(delta) {
  require(gamma_ > 0.0 && delta_ > 0.0,
          "EllipticGaussianPrior: gamma and delta must be > 0");
  require(a_op_.rows() == mass_.n() && a_op_.cols() == mass_.n(),
          "EllipticGaussianPrior: operator size mismatch");
  require(mean_.size() == mass_.n(), "EllipticGaussianPrior: mean size mismatch");
  a_op_.makeCompressed();
  a_solver_.compute(a_op_);
  require(a_solver_.info() == Eigen::Success,
          "EllipticGaussianPrior: factorization of A failed (is A SPD?)");
}

std::shared_ptr<EllipticGaussianPrior> EllipticGaussianPrior::make_2d(
    Index nx, Index ny, double length_x, double length_y, double gamma,
    double delta, const Vector& mean) {
  require(nx >= 2 && ny >= 2, "EllipticGaussianPrior::make_2d: grid too small");
  const double hx = length_x / static_cast<double>(nx);
  const double hy = length_y / static_cast<double>(ny);
  MassMatrix mass = MassMatrix::uniform(nx * ny, hx * hy);
  Eigen::SparseMatrix<double> a = stiffness_2d(nx, ny, hx, hy) * gamma;
  Eigen::SparseMatrix<double> m_sparse(nx * ny, nx * ny);
  m_sparse.setIdentity();
  m_sparse *= delta * hx * hy;
  a += m_sparse;
  return std::make_shared<EllipticGaussianPrior>(std::move(a), std::move(mass),
                                                 mean, gamma, delta);
}

std::shared_ptr<EllipticGaussianPrior> EllipticGaussianPrior::make_1d(
    Index n, double length, double gamma, double delta, const Vector& mean) {
  require(n >= 2, "EllipticGaussianPrior::make_1d: need at least 2 nodes");
  const double h = length / static_cast<double>(n - 1);
  MassMatrix mass = MassMatrix::uniform(n, h);
  Eigen::SparseMatrix<double> a = stiffness_1d(n, h) * gamma;
  Eigen::SparseMatrix<double> m_sparse(n, n);
  m_sparse.setIdentity();
  m_sparse *= delta * h;
  a += m_sparse;
  return std::make_shared<EllipticGaussianPrior>(std::move(a), std::move(mass),
                                                 mean, gamma, delta);
}

std::shared_ptr<EllipticGaussianPrior> EllipticGaussianPrior::make_1d_with_scalars(
    Index n_grid, double length, double gamma, double delta,
    const Vector& scalar_sigmas, const Vector& mean) {
  require(n_grid >= 2, "make_1d_with_scalars: need at least 2 grid nodes");
  require((scalar_sigmas.array() > 0.0).all(),
          "make_1d_with_scalars: scalar sigmas must be positive");
  const Index n_s = scalar_sigmas.size();
  const Index n = n_grid + n_s;
  require(mean.size() == n, "make_1d_with_scalars: mean size mismatch");

  const double h = length / static_cast<double>(n_grid - 1);
  Vector mass_diag(n);
  mass_diag.head(n_grid).setConstant(h);
  mass_diag.tail(n_s).setOnes();

  // Block operator: elliptic block for the grid, 1/sigma on scalars so every
  // scalar gets variance sigma^2 under C = A^{-1} M A^{-1} M.
  Eigen::SparseMatrix<double> grid_block = stiffness_1d(n_grid, h) * gamma;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(grid_block.nonZeros()) +
                   static_cast<std::size_t>(n_grid + n_s));
  for (int k = 0; k < grid_block.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(grid_block, k); it; ++it) {
      triplets.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Index i = 0; i < n_grid; ++i) triplets.emplace_back(i, i, delta * h);
  for (Index i = 0; i < n_s; ++i) {
    triplets.emplace_back(n_grid + i, n_grid + i, 1.0 / scalar_sigmas[i]);
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return std::make_shared<EllipticGaussianPrior>(
      std::move(a), MassMatrix(mass_diag), mean, gamma, delta);
}

Vector EllipticGaussianPrior::solve_a(const Vector& v) const {
  Vector z = a_solver_.solve(v);
  if (!z.allFinite()) {
    throw SolverError("EllipticGaussianPrior: elliptic solve failed");
  }
  return z;
}

Vector EllipticGaussianPrior::apply_cov(const Vector& v) const {
  require(v.size() == dim(), "apply_cov: dimension mismatch");
  // C v = A^{-1} M A^{-1} M v, two elliptic solves.
  return solve_a(mass_.apply(solve_a(mass_.apply(v))));
}

Vector EllipticGaussianPrior::apply_precision(const Vector& v) const {
  require(v.size() == dim(), "apply_precision: dimension mismatch");
  // C^{-1} v = M^{-1} A M^{-1} A v, sparse matvecs only.
  return mass_.apply_inv(a_op_ * mass_.apply_inv(a_op_ * v));
}

Vector EllipticGaussianPrior::apply_sqrt_cov(const Vector& x) const {
  require(x.size() == dim(), "apply_sqrt_cov: dimension mismatch");
  return solve_a(mass_.apply_sqrt(x));
}

Vector EllipticGaussianPrior::apply_sqrt_cov_transpose(const Vector& v) const {
  require(v.size() == dim(), "apply_sqrt_cov_transpose: dimension mismatch");
  // (A^{-1} M^{1/2})^T = M^{1/2} A^{-1} since A is symmetric.
  return mass_.apply_sqrt(solve_a(v));
}

double EllipticGaussianPrior::compute_trace_cov() const {
  // tr(C) = sum_i M_ii (A^{-1} M A^{-1})_ii = sum_i M_ii <A^{-1} e_i, M A^{-1} e_i>,
  // one solve per column.
  const Index n = dim();
  double total = 0.0;
  Vector basis = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    basis[i] = 1.0;
    const Vector column = a_solver_.solve(basis);
    total += mass_.diag()[i] * m_inner(column, column, mass_);
    basis[i] = 0.0;
  }
  return total;
}

DenseGaussianPrior::DenseGaussianPrior(Matrix cov_operator, MassMatrix mass,
                                       Vector mean)
    : cov_(std::move(cov_operator)), mass_(std::move(mass)), mean_(std::move(mean)) {
  const Index n = mass_.n();
  require(cov_.rows() == n && cov_.cols() == n,
          "DenseGaussianPrior: covariance size mismatch");
  require(mean_.size() == n, "DenseGaussianPrior: mean size mismatch");

  const Matrix weighted = mass_.diag().asDiagonal() * cov_;
  require((weighted - weighted.transpose()).cwiseAbs().maxCoeff() <=
              1e-10 * (1.0 + weighted.cwiseAbs().maxCoeff()),
          "DenseGaussianPrior: M C must be symmetric");
  weighted_llt_.compute(0.5 * (weighted + weighted.transpose()));
  require(weighted_llt_.info() == Eigen::Success,
          "DenseGaussianPrior: M C is not positive definite");

  // Euclidean coefficient covariance Sigma = C M^{-1}; factor for sampling.
  const Matrix sigma = cov_ * mass_.apply_inv(Vector::Ones(n)).asDiagonal();
  Eigen::LLT<Matrix> sigma_llt(0.5 * (sigma + sigma.transpose()));
  require(sigma_llt.info() == Eigen::Success,
          "DenseGaussianPrior: coefficient covariance is not positive definite");
  sqrt_factor_ = sigma_llt.matrixL();
}

std::shared_ptr<DenseGaussianPrior> DenseGaussianPrior::diagonal(
    const Vector& variances) {
  require((variances.array() > 0.0).all(),
          "DenseGaussianPrior::diagonal: variances must be positive");
  const Index n = variances.size();
  return std::make_shared<DenseGaussianPrior>(
      Matrix(variances.asDiagonal()), MassMatrix::identity(n), Vector::Zero(n));
}

Vector DenseGaussianPrior::apply_cov(const Vector& v) const {
  require(v.size() == dim(), "apply_cov: dimension mismatch");
  return cov_ * v;
}

Vector DenseGaussianPrior::apply_precision(const Vector& v) const {
  require(v.size() == dim(), "apply_precision: dimension mismatch");
  // C^{-1} = (M C)^{-1} M.
  return weighted_llt_.solve(mass_.apply(v));
}

Vector DenseGaussianPrior::apply_sqrt_cov(const Vector& x) const {
  require(x.size() == dim(), "apply_sqrt_cov: dimension mismatch");
  return sqrt_factor_ * x;
}

Vector DenseGaussianPrior::apply_sqrt_cov_transpose(const Vector& v) const {
  require(v.size() == dim(), "apply_sqrt_cov_transpose: dimension mismatch");
  return sqrt_factor_.transpose() * v;
}

}  // namespace oed
