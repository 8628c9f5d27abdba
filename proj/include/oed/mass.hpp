// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "oed/types.hpp"

namespace oed {

/// Diagonal (lumped) mass matrix defining the discrete L2 inner product
/// <u, v>_M = sum_i u_i M_ii v_i on the parameter space.
///
/// All parameter-space adjoints in this library are weighted by a MassMatrix;
/// non-diagonal (consistent) mass matrices are a documented extension point.
class MassMatrix {
public:
  MassMatrix() = default;

  explicit MassMatrix(Vector diag) : diag_(std::move(diag)) {
    require(diag_.size() > 0, "MassMatrix: diagonal must be non-empty");
    require((diag_.array() > 0.0).all(),
            "MassMatrix: all diagonal entries must be positive");
  }

  /// Constant-diagonal mass h^d * I, the form used by the built-in
  /// uniform-grid models.
  static MassMatrix uniform(Index n, double value) {
    require(n > 0, "MassMatrix::uniform: n must be positive");
    require(value > 0.0, "MassMatrix::uniform: value must be positive");
    return MassMatrix(Vector::Constant(n, value));
  }

  static MassMatrix identity(Index n) { return uniform(n, 1.0); }

  Index n() const { return diag_.size(); }
  const Vector& diag() const { return diag_; }

  Vector apply(const Vector& v) const {
    check(v);
    return diag_.cwiseProduct(v);
  }
  Vector apply_inv(const Vector& v) const {
    check(v);
    return v.cwiseQuotient(diag_);
  }
  Vector apply_sqrt(const Vector& v) const {
    check(v);
    return diag_.cwiseSqrt().cwiseProduct(v);
  }
  Vector apply_inv_sqrt(const Vector& v) const {
    check(v);
    return v.cwiseQuotient(diag_.cwiseSqrt());
  }

private:
  void check(const Vector& v) const {
    require(v.size() == diag_.size(), "MassMatrix: dimension mismatch");
  }

  Vector diag_;
};

/// Discrete L2(D) inner product sum_i u_i M_ii v_i. Symmetric in (u, v).
template <class DerivedU, class DerivedV>
double m_inner(const Eigen::MatrixBase<DerivedU>& u,
               const Eigen::MatrixBase<DerivedV>& v, const MassMatrix& mass) {
  require(u.size() == mass.n() && v.size() == mass.n(),
          "m_inner: dimension mismatch");
  return (u.array() * mass.diag().array() * v.array()).sum();
}

template <class Derived>
double m_norm(const Eigen::MatrixBase<Derived>& u, const MassMatrix& mass) {
  return std::sqrt(m_inner(u, u, mass));
}

}  // namespace oed
