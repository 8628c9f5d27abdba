// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <memory>

#include "oed/models/advection_diffusion.hpp"
#include "oed/models/sensors.hpp"
#include "oed/models/toy.hpp"
#include "oed/random.hpp"
#include "oracles.hpp"

using namespace oed;
using models::AdvectionDiffusionConfig;
using models::AdvectionDiffusionModel;
using models::SensorArray;

namespace {

std::shared_ptr<const SensorArray> lattice_sensors(
    const AdvectionDiffusionConfig& config, Index ns_x, Index ns_y) {
  return std::make_shared<SensorArray>(
      models::sensor_lattice(ns_x, ns_y, config.length_x, config.length_y),
      config.nx, config.ny, config.length_x, config.length_y);
}

}  // namespace

TEST_CASE("toy dense model forward and adjoint") {
  SUBCASE("identity map") {
    models::ToyDenseModel toy(Matrix::Identity(3, 3), MassMatrix::identity(3));
    Vector v(3);
    v << 1.0, -2.0, 0.5;
    CHECK((models::toy_forward(toy, v) - v).norm() == 0.0);
    CHECK((models::toy_adjoint(toy, v) - v).norm() == 0.0);
  }

  SUBCASE("Euclidean mass gives the plain transpose") {
    oed::rng::Engine engine(7);
    Matrix a(2, 3);
    for (Index i = 0; i < 6; ++i) a(i / 3, i % 3) = engine.next_normal();
    models::ToyDenseModel toy(a, MassMatrix::identity(3));
    const Vector d = rng::standard_normal(2, engine);
    CHECK((models::toy_adjoint(toy, d) - a.transpose() * d).norm() <= 1e-15);
  }

  SUBCASE("weighted adjoint matches hand-assembled M^{-1} A^T") {
    oed::rng::Engine engine(9);
    Matrix a(3, 4);
    for (Index i = 0; i < 12; ++i) a(i / 4, i % 4) = engine.next_normal();
    Vector diag(4);
    diag << 1.0, 2.0, 3.0, 4.0;
    models::ToyDenseModel toy(a, MassMatrix(diag));
    const Matrix expected = diag.cwiseInverse().asDiagonal() * a.transpose();
    const Vector d = rng::standard_normal(3, engine);
    CHECK((models::toy_adjoint(toy, d) - expected * d).cwiseAbs().maxCoeff() <=
          1e-14);
    CHECK(verify_adjoint(toy.forward_operator(), 20, 4) <= 1e-12);
  }

  SUBCASE("dimension mismatch") {
    models::ToyDenseModel toy(Matrix::Identity(2, 2), MassMatrix::identity(2));
    CHECK_THROWS_AS(models::toy_forward(toy, Vector::Zero(3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(models::toy_adjoint(toy, Vector::Zero(3)),
                    std::invalid_argument);
  }
}

TEST_CASE("sensor array extraction") {
  AdvectionDiffusionConfig config;
  config.nx = 8;
  config.ny = 8;
  auto sensors = lattice_sensors(config, 3, 3);

  // Interpolation weights per sensor sum to one: a constant field reads back
  // exactly.
  const Vector ones = Vector::Ones(config.nx * config.ny);
  CHECK((sensors->extract(3.25 * ones).array() - 3.25).abs().maxCoeff() <=
        1e-14);

  CHECK_THROWS_AS(SensorArray({{1.5, 0.5}}, config.nx, config.ny, 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(SensorArray({{0.5, 0.0}}, config.nx, config.ny, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("advection-diffusion basics") {
  AdvectionDiffusionConfig config;
  config.nx = 8;
  config.ny = 8;
  config.n_steps = 10;
  auto model = std::make_shared<AdvectionDiffusionModel>(config);
  auto sensors = lattice_sensors(config, 3, 3);

  SUBCASE("zero initial condition maps to zero data") {
    const Vector d =
        models::forward_apply(*model, *sensors, Vector::Zero(model->n()));
    CHECK(d.norm() == 0.0);
  }

  SUBCASE("no velocity: constant field is a steady state read by every sensor") {
    AdvectionDiffusionConfig still = config;
    still.velocity_x = 0.0;
    still.velocity_y = 0.0;
    AdvectionDiffusionModel diffusion_only(still);
    const Vector m = Vector::Constant(diffusion_only.n(), 0.7);
    const Vector d = models::forward_apply(diffusion_only, *sensors, m);
    CHECK((d.array() - 0.7).abs().maxCoeff() <= 1e-12);
  }

  SUBCASE("invalid configurations are rejected") {
    AdvectionDiffusionConfig bad = config;
    bad.kappa = 0.0;
    CHECK_THROWS_AS(AdvectionDiffusionModel{bad}, std::invalid_argument);
    bad = config;
    bad.nx = 3;
    CHECK_THROWS_AS(AdvectionDiffusionModel{bad}, std::invalid_argument);
    bad = config;
    bad.n_steps = 0;
    CHECK_THROWS_AS(AdvectionDiffusionModel{bad}, std::invalid_argument);
  }
}

TEST_CASE("mass conservation and diffusive contraction without velocity") {
  AdvectionDiffusionConfig config;
  config.nx = 12;
  config.ny = 12;
  config.velocity_x = 0.0;
  config.velocity_y = 0.0;
  config.n_steps = 15;
  AdvectionDiffusionModel model(config);

  rng::Engine engine(31);
  Vector u = rng::standard_normal(model.n(), engine).array() + 2.0;
  const double cell = model.hx() * model.hy();
  double integral = cell * u.sum();
  double norm = u.norm();
  for (int k = 0; k < config.n_steps; ++k) {
    u = model.step(u);
    const double next_integral = cell * u.sum();
    CHECK(std::abs(next_integral - integral) <=
          1e-12 * std::max(1.0, std::abs(integral)));
    CHECK(u.norm() <= norm * (1.0 + 1e-13));
    integral = next_integral;
    norm = u.norm();
  }
}

TEST_CASE("16x16 forward map: linearity, dense consistency, discrete adjoint") {
  AdvectionDiffusionConfig config;  // 16x16 defaults
  auto model = std::make_shared<AdvectionDiffusionModel>(config);
  auto sensors = lattice_sensors(config, 4, 4);
  const auto forward = models::forward_operator(model, sensors);

  const Matrix f_dense = dense_assemble(forward);
  rng::Engine engine(41);

  SUBCASE("matches its dense assembly on random vectors") {
    for (int trial = 0; trial < 10; ++trial) {
      const Vector m = rng::standard_normal(model->n(), engine);
      const Vector via_solver = forward.apply(m);
      CHECK((via_solver - f_dense * m).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  SUBCASE("linearity on random triples") {
    for (int trial = 0; trial < 5; ++trial) {
      const Vector u = rng::standard_normal(model->n(), engine);
      const Vector v = rng::standard_normal(model->n(), engine);
      const double a = engine.next_normal();
      const double b = engine.next_normal();
      const Vector lhs = forward.apply(a * u + b * v);
      const Vector rhs = a * forward.apply(u) + b * forward.apply(v);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  SUBCASE("discrete adjoint is exact") {
    CHECK(verify_adjoint(forward, 20, 42) <= 1e-10);
    const Vector zero = models::adjoint_apply(*model, *sensors,
                                              Vector::Zero(sensors->size()));
    CHECK(zero.norm() == 0.0);
  }

  SUBCASE("unit data vector picks out one M-weighted row of F") {
    const Index k = 5;
    Vector ek = Vector::Zero(sensors->size());
    ek[k] = 1.0;
    const Vector adjoint_row = models::adjoint_apply(*model, *sensors, ek);
    const Vector expected =
        model->mass().apply_inv(f_dense.row(k).transpose());
    CHECK((adjoint_row - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
