// SPDX-License-Identifier: Apache-2.0
#include "oed/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "oed/parallel.hpp"

namespace oed {

namespace {

Vector project_box(const Vector& w) {
  return w.cwiseMax(0.0).cwiseMin(1.0);
}

struct InnerResult {
  Vector w;
  OuterTrace trace;
};

/// Projected gradient descent with Armijo backtracking on
/// psi(w) = phi(w) + gamma <d, w> over the box [0,1]^{n_s} (weights are
/// non-negative, so the l1 term is linear there).
InnerResult solve_subproblem(const DesignObjective& phi,
                             const DesignGradient& grad, Vector w,
                             double gamma, const Vector& reweight,
                             double epsilon, const OptimizerOptions& options) {
  InnerResult result;
  result.trace.epsilon = epsilon;
  result.trace.reweight = reweight;

  w = project_box(w);
  double value = phi(w) + gamma * reweight.dot(w);
  result.trace.objective.push_back(value);
  double step = options.initial_step;

  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    const Vector gradient = grad(w) + gamma * reweight;

    const double gradient_map = (w - project_box(w - gradient)).norm();
    if (gradient_map <= options.gradient_map_tol) {
      result.trace.converged = true;
      break;
    }

    bool accepted = false;
    for (int backtrack = 0; backtrack < options.max_backtracks; ++backtrack) {
      const Vector candidate = project_box(w - step * gradient);
      const Vector displacement = candidate - w;
      if (displacement.norm() == 0.0) break;
      const double predicted = gradient.dot(displacement);
      const double candidate_value = phi(candidate) + gamma * reweight.dot(candidate);
      if (candidate_value <= value + options.armijo_c * predicted) {
        w = candidate;
        value = candidate_value;
        result.trace.objective.push_back(value);
        ++result.trace.iterations;
        step *= options.step_growth;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent step found at machine resolution
  }

  result.w = w;
  return result;
}

/// One full solve (single l1 pass or the reweighted outer loop) at a fixed
/// penalty weight.
std::pair<Vector, std::vector<OuterTrace>> solve_at_gamma(
    const DesignObjective& phi, const DesignGradient& grad, Index n_s,
    const PenaltyConfig& penalty, double gamma, const Vector& w0,
    const OptimizerOptions& options) {
  std::vector<OuterTrace> traces;
  Vector w = project_box(w0);

  if (penalty.kind == PenaltyConfig::Kind::L1 || gamma == 0.0) {
    InnerResult inner = solve_subproblem(phi, grad, w, gamma,
                                         Vector::Ones(n_s), 0.0, options);
    traces.push_back(std::move(inner.trace));
    return {inner.w, traces};
  }

  double epsilon = penalty.epsilon;
  for (int outer = 0; outer < penalty.max_outer; ++outer) {
    const Vector reweight =
        (w.cwiseAbs().array() + epsilon).inverse().matrix();
    InnerResult inner =
        solve_subproblem(phi, grad, w, gamma, reweight, epsilon, options);
    w = inner.w;
    traces.push_back(std::move(inner.trace));

    double distance_to_binary = 0.0;
    for (Index i = 0; i < n_s; ++i) {
      distance_to_binary =
          std::max(distance_to_binary, std::min(w[i], 1.0 - w[i]));
    }
    if (distance_to_binary <= options.binary_tol) break;
    epsilon *= penalty.epsilon_decay;
  }
  return {w, traces};
}

Index count_significant(const Vector& w) {
  return (w.array() >= 0.5).count();
}

}  // namespace

OptimizerReport minimize_penalized(const DesignObjective& phi,
                                   const DesignGradient& grad, Index n_s,
                                   const PenaltyConfig& penalty,
                                   const Vector& w0,
                                   std::optional<Index> budget,
                                   const OptimizerOptions& options) {
  penalty.validate();
  require(w0.size() == n_s, "minimize_penalized: w0 size mismatch");
  require((w0.array() >= 0.0).all() && (w0.array() <= 1.0).all(),
          "minimize_penalized: w0 must lie in the box [0,1]");
  if (budget) {
    require(*budget >= 0 && *budget <= n_s,
            "minimize_penalized: budget must lie in [0, n_s]");
  }

  OptimizerReport report;
  try {
    Vector w_relaxed;
    std::vector<OuterTrace> traces;
    double gamma_used = penalty.gamma;

    if (!budget) {
      std::tie(w_relaxed, traces) =
          solve_at_gamma(phi, grad, n_s, penalty, penalty.gamma, w0, options);
    } else {
      // Sweep gamma by bisection until about `budget` significant weights
      // remain; warm-start each trial from the previous relaxed solution.
      const Index k = *budget;
      Vector warm = w0;
      auto run = [&](double gamma) {
        auto solved = solve_at_gamma(phi, grad, n_s, penalty, gamma, warm, options);
        warm = solved.first;
        return solved;
      };

      double lo = 0.0;
      auto solved = run(lo);
      w_relaxed = solved.first;
      traces = std::move(solved.second);
      gamma_used = lo;

      if (count_significant(w_relaxed) > k) {
        const Vector g0 = grad(project_box(w0));
        double hi = std::max({penalty.gamma, g0.cwiseAbs().maxCoeff(), 1e-8});
        auto at_hi = run(hi);
        int doublings = 0;
        while (count_significant(at_hi.first) > k && doublings < 60) {
          hi *= 2.0;
          at_hi = run(hi);
          ++doublings;
        }
        w_relaxed = at_hi.first;
        traces = std::move(at_hi.second);
        gamma_used = hi;

        for (int bisect = 0; bisect < 40; ++bisect) {
          if (count_significant(w_relaxed) == k) break;
          const double mid = 0.5 * (lo + hi);
          auto at_mid = run(mid);
          if (count_significant(at_mid.first) > k) {
            lo = mid;
          } else {
            hi = mid;
            w_relaxed = at_mid.first;
            traces = std::move(at_mid.second);
            gamma_used = mid;
          }
        }
      }
    }

    report.w_relaxed = DesignVector(project_box(w_relaxed));
    report.outer = std::move(traces);
    report.gamma_used = gamma_used;
    for (const OuterTrace& trace : report.outer) {
      report.total_inner_iterations += trace.iterations;
    }
    report.converged =
        report.outer.empty() ? false : report.outer.back().converged;
    report.phi_relaxed = phi(report.w_relaxed.weights());
    report.active_set = report.w_relaxed.active_set(0.5);

    if (budget) {
      report.w_binary = threshold(report.w_relaxed, *budget);
      report.has_binary = true;
      report.phi_binary = phi(report.w_binary.weights());
      report.active_set = report.w_binary.active_set(0.5);
    }
  } catch (const std::exception& error) {
    report.aborted = true;
    report.abort_reason = error.what();
  }
  return report;
}

OptimizerReport optimize_weights(const BayesianLinearProblem& problem,
                                 const CriterionSpec& spec,
                                 const EstimatorConfig& estimator,
                                 const PenaltyConfig& penalty, const Vector& w0,
                                 std::optional<Index> budget,
                                 const OptimizerOptions& options) {
  spec.validate(problem.n_param());
  const DesignObjective phi = [&](const Vector& w) {
    return evaluate_criterion(problem, DesignVector(project_box(w)), spec,
                              estimator);
  };
  const DesignGradient grad = [&](const Vector& w) {
    return grad_phi(problem, DesignVector(project_box(w)), spec, estimator);
  };
  return minimize_penalized(phi, grad, problem.n_sensors(), penalty, w0,
                            budget, options);
}

DesignVector threshold(const DesignVector& w, Index k) {
  require(k >= 0 && k <= w.size(), "threshold: K must lie in [0, n_s]");
  std::vector<Index> order(static_cast<std::size_t>(w.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (w[a] != w[b]) return w[a] > w[b];
    return a < b;
  });
  Vector binary = Vector::Zero(w.size());
  for (Index rank = 0; rank < k; ++rank) {
    binary[order[static_cast<std::size_t>(rank)]] = 1.0;
  }
  return DesignVector(binary);
}

GreedyResult greedy_minimize(const DesignObjective& phi, Index n_s, Index k) {
  require(k >= 0 && k <= n_s, "greedy_minimize: K must lie in [0, n_s]");
  GreedyResult result;
  Vector w = Vector::Zero(n_s);

  std::vector<Index> remaining(static_cast<std::size_t>(n_s));
  std::iota(remaining.begin(), remaining.end(), Index{0});

  for (Index pass = 0; pass < k; ++pass) {
    std::vector<double> values(remaining.size());
    par::parallel_for(static_cast<Index>(remaining.size()), [&](Index c) {
      Vector candidate = w;
      candidate[remaining[static_cast<std::size_t>(c)]] = 1.0;
      values[static_cast<std::size_t>(c)] = phi(candidate);
    });

    std::size_t best = 0;
    for (std::size_t c = 1; c < values.size(); ++c) {
      if (values[c] < values[best]) best = c;  // ties keep the lowest index
    }
    const Index chosen = remaining[best];
    w[chosen] = 1.0;
    result.steps.push_back({chosen, values[best]});
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
  }

  result.w = DesignVector(w);
  return result;
}

GreedyResult greedy_placement(const BayesianLinearProblem& problem,
                              const CriterionSpec& spec,
                              const EstimatorConfig& estimator, Index k) {
  spec.validate(problem.n_param());
  return greedy_minimize(
      [&](const Vector& w) {
        return evaluate_criterion(problem, DesignVector(w), spec, estimator);
      },
      problem.n_sensors(), k);
}

ExhaustiveResult exhaustive_minimize(const DesignObjective& phi, Index n_s,
                                     Index k, std::size_t guard) {
  require(k >= 0 && k <= n_s, "exhaustive_minimize: K must lie in [0, n_s]");

  // C(n_s, k) with overflow-safe early exit against the guard.
  double combinations = 1.0;
  for (Index i = 0; i < k; ++i) {
    combinations *= static_cast<double>(n_s - i) / static_cast<double>(i + 1);
    require(combinations <= static_cast<double>(guard),
            "exhaustive_minimize: combinatorial count exceeds the guard");
  }

  std::vector<std::vector<Index>> subsets;
  subsets.reserve(static_cast<std::size_t>(combinations) + 1);
  std::vector<Index> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), Index{0});
  if (k == 0) {
    subsets.push_back({});
  } else {
    for (;;) {
      subsets.push_back(pick);
      Index slot = k - 1;
      while (slot >= 0 && pick[static_cast<std::size_t>(slot)] ==
                              n_s - k + slot) {
        --slot;
      }
      if (slot < 0) break;
      ++pick[static_cast<std::size_t>(slot)];
      for (Index next = slot + 1; next < k; ++next) {
        pick[static_cast<std::size_t>(next)] =
            pick[static_cast<std::size_t>(next - 1)] + 1;
      }
    }
  }

  std::vector<double> values(subsets.size());
  par::parallel_for(static_cast<Index>(subsets.size()), [&](Index s) {
    Vector w = Vector::Zero(n_s);
    for (Index i : subsets[static_cast<std::size_t>(s)]) w[i] = 1.0;
    values[static_cast<std::size_t>(s)] = phi(w);
  });

  // Enumeration order is lexicographic, so strict improvement keeps the
  // lexicographically smallest minimizer.
  std::size_t best = 0;
  for (std::size_t s = 1; s < values.size(); ++s) {
    if (values[s] < values[best]) best = s;
  }

  ExhaustiveResult result;
  Vector w = Vector::Zero(n_s);
  for (Index i : subsets[best]) w[i] = 1.0;
  result.w = DesignVector(w);
  result.phi = values[best];
  result.evaluated = subsets.size();
  return result;
}

ExhaustiveResult exhaustive_search(const BayesianLinearProblem& problem,
                                   const CriterionSpec& spec,
                                   const EstimatorConfig& estimator, Index k,
                                   std::size_t guard) {
  spec.validate(problem.n_param());
  return exhaustive_minimize(
      [&](const Vector& w) {
        return evaluate_criterion(problem, DesignVector(w), spec, estimator);
      },
      problem.n_sensors(), k, guard);
}

}  // namespace oed
