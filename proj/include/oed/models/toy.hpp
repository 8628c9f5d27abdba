// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "oed/space.hpp"

namespace oed::models {

/// Dense parameter-to-observable map, used as a plug-in oracle model and for
/// desk-size synthetic problems.
class ToyDenseModel {
public:
  ToyDenseModel(Matrix matrix, MassMatrix mass)
      : matrix_(std::move(matrix)), mass_(std::move(mass)) {
    require(matrix_.cols() == mass_.n(),
            "ToyDenseModel: matrix columns must match mass dimension");
  }

  Index n_param() const { return matrix_.cols(); }
  Index n_data() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  const MassMatrix& mass() const { return mass_; }

  LinearOperatorHandle forward_operator() const {
    Matrix a = matrix_;
    return LinearOperatorHandle(
        SpaceTag::parameter(mass_), SpaceTag::euclidean(a.rows()),
        [a](const Vector& v) { return Vector(a * v); },
        [a](const Vector& d) { return Vector(a.transpose() * d); });
  }

private:
  Matrix matrix_;
  MassMatrix mass_;
};

inline Vector toy_forward(const ToyDenseModel& model, const Vector& v) {
  require(v.size() == model.n_param(), "toy_forward: dimension mismatch");
  return model.matrix() * v;
}

/// M-weighted adjoint action M^{-1} A^T d.
inline Vector toy_adjoint(const ToyDenseModel& model, const Vector& d) {
  require(d.size() == model.n_data(), "toy_adjoint: dimension mismatch");
  return model.mass().apply_inv(model.matrix().transpose() * d);
}

}  // namespace oed::models
