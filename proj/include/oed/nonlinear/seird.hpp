// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "oed/types.hpp"

namespace oed::nonlinear {

/// SEIRD compartment model with a time-dependent transmission rate beta(t)
/// (piecewise linear on a uniform grid over [0, t_end]) and scalar rates for
/// progression (sigma_e), recovery (gamma_rec), and mortality (delta_mort).
/// Total population S+E+I+R+D is conserved exactly by the dynamics.
struct SeirdConfig {
  double n_pop = 1.0;    // population scale; defaults to fractions
  double t_end = 100.0;
  Index n_beta = 8;      // beta(t) grid nodes
  Index rk_steps = 200;  // base RK4 step count over [0, t_end]
  // Initial compartments as fractions of n_pop.
  double s0 = 0.96;
  double e0 = 0.02;
  double i0 = 0.02;
  double r0 = 0.0;
  double d0 = 0.0;
};

struct SeirdRawParams {
  Vector beta_nodes;  // n_beta values, >= 0
  double sigma_e = 0.2;
  double gamma_rec = 0.1;
  double delta_mort = 0.01;
};

class SeirdModel {
public:
  explicit SeirdModel(const SeirdConfig& config);

  const SeirdConfig& config() const { return config_; }
  Index n_beta() const { return config_.n_beta; }
  /// Raw parameter dimension: beta grid plus the three scalar rates.
  Index n_raw() const { return config_.n_beta + 3; }

  /// Integrates the model with classical fixed-step RK4 and returns the
  /// infected counts I(t_j) at the requested observation times. Step sizes
  /// subdivide the intervals between observation times so every t_j is hit
  /// exactly. If `sensitivity` is given it receives dI(t_j)/d(raw params)
  /// (n_times x n_raw), integrated alongside the state so the rows are the
  /// exact derivatives of the discrete scheme.
  ///
  /// Throws SolverError with the failing time index if the state blows up.
  Vector observe_infected(const SeirdRawParams& params, const Vector& times,
                          Matrix* sensitivity = nullptr) const;

  /// Full trajectory on the base step grid, for export: each row is
  /// (t, S, E, I, R, D).
  Matrix trajectory(const SeirdRawParams& params) const;

  /// beta(t) by piecewise-linear interpolation of the grid values.
  double beta_at(const Vector& beta_nodes, double time) const;

private:
  SeirdConfig config_;
};

}  // namespace oed::nonlinear
