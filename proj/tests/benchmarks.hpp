// SPDX-License-Identifier: Apache-2.0
//
// The desk-scale benchmark instances shared by the unit and acceptance
// suites. These match the shipped configuration files.
#pragma once

#include <memory>

#include "oed/models/advection_diffusion.hpp"
#include "oed/posterior.hpp"
#include "oed/random.hpp"

namespace bench {

using namespace oed;

/// 16x16 advection-diffusion transport problem with a 5x5 sensor lattice.
/// Used by the adjoint, route-equivalence, trace, and gradient checks.
inline std::shared_ptr<BayesianLinearProblem> ad16_lattice(double sigma = 0.1,
                                                           Index axis = 5) {
  models::AdvectionDiffusionConfig config;  // 16x16 defaults
  auto model = std::make_shared<models::AdvectionDiffusionModel>(config);
  auto sensors = std::make_shared<models::SensorArray>(
      models::sensor_lattice(axis, axis, config.length_x, config.length_y),
      config.nx, config.ny, config.length_x, config.length_y);
  auto prior = EllipticGaussianPrior::make_2d(config.nx, config.ny,
                                              config.length_x, config.length_y,
                                              0.1, 1.0, Vector::Zero(model->n()));
  return std::make_shared<BayesianLinearProblem>(
      models::forward_operator(model, sensors), prior, sigma);
}

/// Ten scattered candidate sensors (fixed placement stream), noise 0.2.
/// The selection benchmark: greedy/exhaustive and sparsification runs.
inline std::shared_ptr<BayesianLinearProblem> ad16_scatter10() {
  models::AdvectionDiffusionConfig config;
  auto model = std::make_shared<models::AdvectionDiffusionModel>(config);
  rng::Engine engine(11);
  std::vector<models::Point2> coords;
  for (int s = 0; s < 10; ++s) {
    coords.push_back({0.08 + 0.84 * engine.next_uniform(),
                      0.08 + 0.84 * engine.next_uniform()});
  }
  auto sensors = std::make_shared<models::SensorArray>(
      coords, config.nx, config.ny, config.length_x, config.length_y);
  auto prior = EllipticGaussianPrior::make_2d(config.nx, config.ny,
                                              config.length_x, config.length_y,
                                              0.1, 1.0, Vector::Zero(model->n()));
  return std::make_shared<BayesianLinearProblem>(
      models::forward_operator(model, sensors), prior, 0.2);
}

/// Penalty weight of the shipped sparsification run on ad16_scatter10.
inline constexpr double kSparsifyGamma = 0.01;
inline constexpr Index kSparsifyActive = 4;

}  // namespace bench
