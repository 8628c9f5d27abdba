// SPDX-License-Identifier: Apache-2.0
#include "oed/nonlinear/seird.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace oed::nonlinear {

namespace {

constexpr int kState = 5;  // S, E, I, R, D

struct Derivative {
  Eigen::Matrix<double, kState, 1> f;
  Eigen::Matrix<double, kState, kState> df_dy;
  Eigen::Matrix<double, kState, Eigen::Dynamic> df_dp;
};

}  // namespace

SeirdModel::SeirdModel(const SeirdConfig& config) : config_(config) {
  require(config_.n_pop > 0.0, "SeirdModel: population must be positive");
  require(config_.t_end > 0.0, "SeirdModel: horizon must be positive");
  require(config_.n_beta >= 2, "SeirdModel: need at least 2 beta nodes");
  require(config_.rk_steps >= 1, "SeirdModel: rk_steps must be >= 1");
  const double total =
      config_.s0 + config_.e0 + config_.i0 + config_.r0 + config_.d0;
  require(std::abs(total - 1.0) <= 1e-12,
          "SeirdModel: initial fractions must sum to 1");
  require(config_.s0 >= 0.0 && config_.e0 >= 0.0 && config_.i0 >= 0.0 &&
              config_.r0 >= 0.0 && config_.d0 >= 0.0,
          "SeirdModel: initial fractions must be nonnegative");
}

double SeirdModel::beta_at(const Vector& beta_nodes, double time) const {
  const Index n = config_.n_beta;
  const double spacing = config_.t_end / static_cast<double>(n - 1);
  const double position =
      std::clamp(time / spacing, 0.0, static_cast<double>(n - 1));
  const Index left = std::min<Index>(static_cast<Index>(position), n - 2);
  const double fraction = position - static_cast<double>(left);
  return (1.0 - fraction) * beta_nodes[left] + fraction * beta_nodes[left + 1];
}

namespace {

/// Right-hand side plus its state and parameter Jacobians at (t, y). The raw
/// parameter layout is (beta nodes..., sigma_e, gamma_rec, delta_mort).
Derivative seird_rhs(const SeirdModel& model, const SeirdRawParams& params,
                     double t, const Eigen::Matrix<double, kState, 1>& y) {
  const SeirdConfig& config = model.config();
  const Index n_beta = config.n_beta;
  const Index n_raw = model.n_raw();
  const double n_pop = config.n_pop;

  const double beta = model.beta_at(params.beta_nodes, t);
  const double s = y[0], e = y[1], i = y[2];
  const double mix = s * i / n_pop;

  Derivative d;
  d.f.setZero();
  d.f[0] = -beta * mix;
  d.f[1] = beta * mix - params.sigma_e * e;
  d.f[2] = params.sigma_e * e - (params.gamma_rec + params.delta_mort) * i;
  d.f[3] = params.gamma_rec * i;
  d.f[4] = params.delta_mort * i;

  d.df_dy.setZero();
  const double dmix_ds = i / n_pop;
  const double dmix_di = s / n_pop;
  d.df_dy(0, 0) = -beta * dmix_ds;
  d.df_dy(0, 2) = -beta * dmix_di;
  d.df_dy(1, 0) = beta * dmix_ds;
  d.df_dy(1, 1) = -params.sigma_e;
  d.df_dy(1, 2) = beta * dmix_di;
  d.df_dy(2, 1) = params.sigma_e;
  d.df_dy(2, 2) = -(params.gamma_rec + params.delta_mort);
  d.df_dy(3, 2) = params.gamma_rec;
  d.df_dy(4, 2) = params.delta_mort;

  d.df_dp.setZero(kState, n_raw);
  // beta(t) is piecewise linear, so only the two bracketing nodes enter.
  const double spacing = config.t_end / static_cast<double>(n_beta - 1);
  const double position =
      std::clamp(t / spacing, 0.0, static_cast<double>(n_beta - 1));
  const Index left = std::min<Index>(static_cast<Index>(position), n_beta - 2);
  const double fraction = position - static_cast<double>(left);
  d.df_dp(0, left) = -mix * (1.0 - fraction);
  d.df_dp(0, left + 1) = -mix * fraction;
  d.df_dp(1, left) = mix * (1.0 - fraction);
  d.df_dp(1, left + 1) = mix * fraction;
  d.df_dp(1, n_beta) = -e;
  d.df_dp(2, n_beta) = e;
  d.df_dp(2, n_beta + 1) = -i;
  d.df_dp(2, n_beta + 2) = -i;
  d.df_dp(3, n_beta + 1) = i;
  d.df_dp(4, n_beta + 2) = i;
  return d;
}

struct AugmentedState {
  Eigen::Matrix<double, kState, 1> y;
  Matrix sensitivity;  // kState x n_raw
};

/// One RK4 step of the state together with its forward sensitivities; the
/// sensitivity stages reuse the state stages, which makes the result the
/// exact derivative of the discrete update.
AugmentedState rk4_step(const SeirdModel& model, const SeirdRawParams& params,
                        double t, double dt, const AugmentedState& state,
                        bool with_sensitivity) {
  auto stage = [&](double time, const AugmentedState& point) {
    const Derivative d = seird_rhs(model, params, time, point.y);
    AugmentedState out;
    out.y = d.f;
    if (with_sensitivity) {
      out.sensitivity = d.df_dy * point.sensitivity + d.df_dp;
    }
    return out;
  };
  auto advance = [&](const AugmentedState& base, double scale,
                     const AugmentedState& slope) {
    AugmentedState out;
    out.y = base.y + scale * slope.y;
    if (with_sensitivity) {
      out.sensitivity = base.sensitivity + scale * slope.sensitivity;
    }
    return out;
  };

  const AugmentedState k1 = stage(t, state);
  const AugmentedState k2 = stage(t + 0.5 * dt, advance(state, 0.5 * dt, k1));
  const AugmentedState k3 = stage(t + 0.5 * dt, advance(state, 0.5 * dt, k2));
  const AugmentedState k4 = stage(t + dt, advance(state, dt, k3));

  AugmentedState next;
  next.y = state.y + (dt / 6.0) * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
  if (with_sensitivity) {
    next.sensitivity =
        state.sensitivity + (dt / 6.0) * (k1.sensitivity + 2.0 * k2.sensitivity +
                                          2.0 * k3.sensitivity + k4.sensitivity);
  }
  return next;
}

AugmentedState initial_state(const SeirdConfig& config, Index n_raw,
                             bool with_sensitivity) {
  AugmentedState state;
  state.y << config.s0, config.e0, config.i0, config.r0, config.d0;
  state.y *= config.n_pop;
  if (with_sensitivity) state.sensitivity = Matrix::Zero(kState, n_raw);
  return state;
}

void check_state(const AugmentedState& state, double n_pop, Index step) {
  const bool finite = state.y.allFinite() &&
                      (state.sensitivity.size() == 0 ||
                       state.sensitivity.allFinite());
  if (!finite || state.y.minCoeff() < -1e-8 * n_pop) {
    throw SolverError("SeirdModel: state blow-up at time step " +
                          std::to_string(step),
                      static_cast<int>(step));
  }
}

}  // namespace

Vector SeirdModel::observe_infected(const SeirdRawParams& params,
                                    const Vector& times,
                                    Matrix* sensitivity) const {
  require(params.beta_nodes.size() == config_.n_beta,
          "SeirdModel: beta grid size mismatch");
  require((params.beta_nodes.array() >= 0.0).all() && params.sigma_e >= 0.0 &&
              params.gamma_rec >= 0.0 && params.delta_mort >= 0.0,
          "SeirdModel: rates must be nonnegative");
  const Index n_times = times.size();
  require(n_times >= 1, "SeirdModel: need at least one observation time");
  for (Index j = 0; j < n_times; ++j) {
    require(times[j] > 0.0 && times[j] <= config_.t_end,
            "SeirdModel: observation times must lie in (0, t_end]");
    require(j == 0 || times[j] > times[j - 1],
            "SeirdModel: observation times must be strictly increasing");
  }

  const bool with_sensitivity = sensitivity != nullptr;
  AugmentedState state = initial_state(config_, n_raw(), with_sensitivity);
  if (with_sensitivity) sensitivity->setZero(n_times, n_raw());
  Vector observed(n_times);

  double t = 0.0;
  Index global_step = 0;
  for (Index j = 0; j < n_times; ++j) {
    const double segment = times[j] - t;
    const Index steps = std::max<Index>(
        1, static_cast<Index>(std::ceil(static_cast<double>(config_.rk_steps) *
                                        segment / config_.t_end)));
    const double dt = segment / static_cast<double>(steps);
    for (Index k = 0; k < steps; ++k) {
      state = rk4_step(*this, params, t, dt, state, with_sensitivity);
      t += dt;
      check_state(state, config_.n_pop, ++global_step);
    }
    t = times[j];  // avoid drift from repeated addition
    observed[j] = state.y[2];
    if (with_sensitivity) sensitivity->row(j) = state.sensitivity.row(2);
  }
  return observed;
}

Matrix SeirdModel::trajectory(const SeirdRawParams& params) const {
  require(params.beta_nodes.size() == config_.n_beta,
          "SeirdModel: beta grid size mismatch");
  const Index steps = config_.rk_steps;
  const double dt = config_.t_end / static_cast<double>(steps);
  AugmentedState state = initial_state(config_, n_raw(), false);

  Matrix rows(steps + 1, 6);
  rows(0, 0) = 0.0;
  rows.block(0, 1, 1, 5) = state.y.transpose();
  double t = 0.0;
  for (Index k = 0; k < steps; ++k) {
    state = rk4_step(*this, params, t, dt, state, false);
    t += dt;
    check_state(state, config_.n_pop, k + 1);
    rows(k + 1, 0) = t;
    rows.block(k + 1, 1, 1, 5) = state.y.transpose();
  }
  return rows;
}

}  // namespace oed::nonlinear
