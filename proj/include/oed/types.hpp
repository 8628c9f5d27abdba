// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <utility>

namespace oed {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when a linear or nonlinear solve fails to produce a usable result.
/// Carries the iteration count and last residual where the solver knows them.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what, int iterations = -1,
                       double residual = 0.0)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

private:
  int iterations_;
  double residual_;
};

/// Thrown on malformed configuration input (unknown keys, bad values).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace oed
