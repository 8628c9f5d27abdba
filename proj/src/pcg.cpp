// SPDX-License-Identifier: Apache-2.0
#include "oed/pcg.hpp"

#include <cmath>
#include <string>

namespace oed {

Vector pcg(const std::function<Vector(const Vector&)>& apply_op,
           const std::function<Vector(const Vector&)>& apply_precond,
           const Vector& rhs, const MassMatrix& mass, const PcgOptions& options,
           PcgInfo* info) {
  const double rhs_norm = m_norm(rhs, mass);
  Vector x = Vector::Zero(rhs.size());
  if (rhs_norm == 0.0) {
    if (info) *info = {0, 0.0};
    return x;
  }

  Vector r = rhs;  // x0 = 0
  Vector z = apply_precond(r);
  Vector p = z;
  double rho = m_inner(r, z, mass);

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const Vector q = apply_op(p);
    const double curvature = m_inner(p, q, mass);
    if (!(curvature > 0.0)) {
      throw SolverError("pcg: operator not positive definite (curvature " +
                            std::to_string(curvature) + ")",
                        iter, m_norm(r, mass) / rhs_norm);
    }
    const double alpha = rho / curvature;
    x += alpha * p;
    r -= alpha * q;

    const double rel = m_norm(r, mass) / rhs_norm;
    if (rel <= options.rtol) {
      if (info) *info = {iter, rel};
      return x;
    }

    z = apply_precond(r);
    const double rho_next = m_inner(r, z, mass);
    p = z + (rho_next / rho) * p;
    rho = rho_next;
  }

  throw SolverError("pcg: no convergence within max_iter", options.max_iter,
                    m_norm(r, mass) / rhs_norm);
}

}  // namespace oed
