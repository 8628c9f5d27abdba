// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "oed/mass.hpp"
#include "oed/types.hpp"

namespace oed {

struct PcgOptions {
  double rtol = 1e-10;
  int max_iter = 1000;
};

struct PcgInfo {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Preconditioned conjugate gradients for an operator that is self-adjoint
/// positive definite in the <.,.>_M inner product; the preconditioner must be
/// M-self-adjoint positive definite as well. Throws SolverError on
/// non-convergence, carrying the iteration count and residual.
Vector pcg(const std::function<Vector(const Vector&)>& apply_op,
           const std::function<Vector(const Vector&)>& apply_precond,
           const Vector& rhs, const MassMatrix& mass,
           const PcgOptions& options = {}, PcgInfo* info = nullptr);

}  // namespace oed
