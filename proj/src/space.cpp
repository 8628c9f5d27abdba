// SPDX-License-Identifier: Apache-2.0
#include "oed/space.hpp"

#include <algorithm>
#include <cmath>

#include "oed/random.hpp"

namespace oed {

Vector m_adjoint_apply(const LinearOperatorHandle& op, const Vector& y) {
  // <A u, y>_cod = u^T A^T M_cod y = <u, M_dom^{-1} A^T M_cod y>_dom.
  return op.domain().unweigh(op.apply_transpose(op.codomain().weigh(y)));
}

double verify_adjoint(const LinearOperatorHandle& op, int trials,
                      std::uint64_t seed) {
  require(trials >= 1, "verify_adjoint: trials must be >= 1");
  constexpr double eps = 1e-30;
  rng::Engine engine(rng::substream(seed, "verify-adjoint"));
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Vector u = rng::standard_normal(op.domain().dim(), engine);
    const Vector y = rng::standard_normal(op.codomain().dim(), engine);
    const double lhs = op.codomain().inner(op.apply(u), y);
    const double rhs = op.domain().inner(u, m_adjoint_apply(op, y));
    const double scale = op.domain().norm(u) * op.codomain().norm(y) + eps;
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

Matrix dense_assemble(const LinearOperatorHandle& op, Index guard) {
  const Index n = op.domain().dim();
  const Index m = op.codomain().dim();
  require(n <= guard && m <= guard,
          "dense_assemble: dimension exceeds the dense-storage guard");
  Matrix dense(m, n);
  Vector basis = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    basis[j] = 1.0;
    dense.col(j) = op.apply(basis);
    basis[j] = 0.0;
  }
  return dense;
}

}  // namespace oed
