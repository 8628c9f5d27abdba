// SPDX-License-Identifier: Apache-2.0
#include "oed/models/advection_diffusion.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace oed::models {

namespace {

using Triplet = Eigen::Triplet<double>;

/// Assembles the spatial operator L with u_t = L u in flux form, so interior
/// faces cancel exactly in column sums and mass is conserved whenever no flux
/// crosses the boundary.
Eigen::SparseMatrix<double> assemble_spatial_operator(
    const AdvectionDiffusionConfig& c) {
  const Index nx = c.nx;
  const Index ny = c.ny;
  const double hx = c.length_x / static_cast<double>(nx);
  const double hy = c.length_y / static_cast<double>(ny);

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(5 * nx * ny));
  auto cell = [nx](Index i, Index j) { return j * nx + i; };

  // Interior faces: diffusive exchange plus upwind advective transport.
  // x-faces between (i, j) and (i+1, j).
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i + 1 < nx; ++i) {
      const Index p = cell(i, j);
      const Index q = cell(i + 1, j);
      const double diffusive = c.kappa / (hx * hx);
      triplets.emplace_back(p, p, -diffusive);
      triplets.emplace_back(p, q, diffusive);
      triplets.emplace_back(q, q, -diffusive);
      triplets.emplace_back(q, p, diffusive);

      const double rate = c.velocity_x / hx;  // face flux / cell volume
      const Index up = c.velocity_x >= 0.0 ? p : q;
      triplets.emplace_back(p, up, -rate);
      triplets.emplace_back(q, up, rate);
    }
  }
  // y-faces between (i, j) and (i, j+1).
  for (Index j = 0; j + 1 < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const Index p = cell(i, j);
      const Index q = cell(i, j + 1);
      const double diffusive = c.kappa / (hy * hy);
      triplets.emplace_back(p, p, -diffusive);
      triplets.emplace_back(p, q, diffusive);
      triplets.emplace_back(q, q, -diffusive);
      triplets.emplace_back(q, p, diffusive);

      const double rate = c.velocity_y / hy;
      const Index up = c.velocity_y >= 0.0 ? p : q;
      triplets.emplace_back(p, up, -rate);
      triplets.emplace_back(q, up, rate);
    }
  }

  // Boundary faces. Diffusive flux vanishes on the whole boundary. The left
  // edge carries zero total flux, so it contributes nothing; the remaining
  // edges let mass advect out where the velocity points outward, and admit no
  // inflow (exterior concentration is zero).
  for (Index j = 0; j < ny; ++j) {
    if (c.velocity_x > 0.0) {  // right edge, outward normal +x
      const Index p = cell(nx - 1, j);
      triplets.emplace_back(p, p, -c.velocity_x / hx);
    }
  }
  for (Index i = 0; i < nx; ++i) {
    if (c.velocity_y > 0.0) {  // top edge, outward normal +y
      const Index p = cell(i, ny - 1);
      triplets.emplace_back(p, p, -c.velocity_y / hy);
    }
    if (c.velocity_y < 0.0) {  // bottom edge, outward normal -y
      const Index p = cell(i, 0);
      triplets.emplace_back(p, p, c.velocity_y / hy);
    }
  }

  Eigen::SparseMatrix<double> op(nx * ny, nx * ny);
  op.setFromTriplets(triplets.begin(), triplets.end());
  return op;
}

}  // namespace

AdvectionDiffusionModel::AdvectionDiffusionModel(
    const AdvectionDiffusionConfig& config)
    : config_(config) {
  require(config_.nx >= 4 && config_.ny >= 4,
          "AdvectionDiffusionModel: grid must be at least 4x4");
  require(config_.kappa > 0.0, "AdvectionDiffusionModel: kappa must be > 0");
  require(config_.n_steps >= 1, "AdvectionDiffusionModel: n_steps must be >= 1");
  require(config_.t_final > 0.0, "AdvectionDiffusionModel: t_final must be > 0");
  require(config_.length_x > 0.0 && config_.length_y > 0.0,
          "AdvectionDiffusionModel: domain lengths must be > 0");

  const double dt = config_.t_final / static_cast<double>(config_.n_steps);
  Eigen::SparseMatrix<double> spatial = assemble_spatial_operator(config_);
  Eigen::SparseMatrix<double> identity(n(), n());
  identity.setIdentity();
  step_matrix_ = identity - dt * spatial;
  step_matrix_.makeCompressed();

  step_solver_.compute(step_matrix_);
  require(step_solver_.info() == Eigen::Success,
          "AdvectionDiffusionModel: implicit step factorization failed");
  Eigen::SparseMatrix<double> transposed = step_matrix_.transpose();
  step_solver_transpose_.compute(transposed);
  require(step_solver_transpose_.info() == Eigen::Success,
          "AdvectionDiffusionModel: adjoint step factorization failed");
}

Vector AdvectionDiffusionModel::step(const Vector& field) const {
  require(field.size() == n(), "AdvectionDiffusionModel::step: dimension mismatch");
  return step_solver_.solve(field);
}

Vector AdvectionDiffusionModel::solve_forward(const Vector& m) const {
  require(m.size() == n(), "AdvectionDiffusionModel: parameter dimension mismatch");
  Vector u = m;
  for (Index k = 0; k < config_.n_steps; ++k) {
    u = step_solver_.solve(u);
    if (!u.allFinite()) {
      throw SolverError(
          "AdvectionDiffusionModel: forward solve broke down at step " +
              std::to_string(k),
          static_cast<int>(k));
    }
  }
  return u;
}

Vector AdvectionDiffusionModel::solve_adjoint_recursion(
    const Vector& terminal) const {
  require(terminal.size() == n(),
          "AdvectionDiffusionModel: adjoint dimension mismatch");
  Vector p = terminal;
  for (Index k = 0; k < config_.n_steps; ++k) {
    p = step_solver_transpose_.solve(p);
    if (!p.allFinite()) {
      throw SolverError(
          "AdvectionDiffusionModel: adjoint solve broke down at step " +
              std::to_string(k),
          static_cast<int>(k));
    }
  }
  return p;
}

Vector forward_apply(const AdvectionDiffusionModel& model,
                     const SensorArray& sensors, const Vector& m) {
  return sensors.extract(model.solve_forward(m));
}

Vector adjoint_apply(const AdvectionDiffusionModel& model,
                     const SensorArray& sensors, const Vector& d) {
  const Vector p = model.solve_adjoint_recursion(sensors.extract_transpose(d));
  return model.mass().apply_inv(p);
}

LinearOperatorHandle forward_operator(
    std::shared_ptr<const AdvectionDiffusionModel> model,
    std::shared_ptr<const SensorArray> sensors) {
  require(model != nullptr && sensors != nullptr,
          "forward_operator: null model or sensors");
  require(sensors->grid_size() == model->n(),
          "forward_operator: sensor grid does not match model grid");
  return LinearOperatorHandle(
      SpaceTag::parameter(model->mass()), SpaceTag::euclidean(sensors->size()),
      [model, sensors](const Vector& m) {
        return sensors->extract(model->solve_forward(m));
      },
      [model, sensors](const Vector& d) {
        return model->solve_adjoint_recursion(sensors->extract_transpose(d));
      });
}

}  // namespace oed::models
