// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "oed/mass.hpp"
#include "oed/types.hpp"

namespace oed {

/// Tags a finite-dimensional vector space with its inner product:
/// either the mass-weighted parameter space (R^n, <.,.>_M) or a plain
/// Euclidean data space.
class SpaceTag {
public:
  enum class Kind { ParameterM, DataEuclidean };

  static SpaceTag parameter(MassMatrix mass) {
    SpaceTag tag;
    tag.kind_ = Kind::ParameterM;
    tag.dim_ = mass.n();
    tag.mass_ = std::make_shared<const MassMatrix>(std::move(mass));
    return tag;
  }

  static SpaceTag euclidean(Index dim) {
    require(dim > 0, "SpaceTag::euclidean: dim must be positive");
    SpaceTag tag;
    tag.kind_ = Kind::DataEuclidean;
    tag.dim_ = dim;
    return tag;
  }

  Kind kind() const { return kind_; }
  Index dim() const { return dim_; }

  bool is_parameter() const { return kind_ == Kind::ParameterM; }

  const MassMatrix& mass() const {
    require(mass_ != nullptr, "SpaceTag: Euclidean space carries no mass matrix");
    return *mass_;
  }

  /// Riesz weights: M v on a parameter space, identity on a Euclidean one.
  Vector weigh(const Vector& v) const {
    return is_parameter() ? mass_->apply(v) : v;
  }
  Vector unweigh(const Vector& v) const {
    return is_parameter() ? mass_->apply_inv(v) : v;
  }

  double inner(const Vector& u, const Vector& v) const {
    if (is_parameter()) return m_inner(u, v, *mass_);
    require(u.size() == dim_ && v.size() == dim_, "SpaceTag::inner: dimension mismatch");
    return u.dot(v);
  }
  double norm(const Vector& v) const { return std::sqrt(inner(v, v)); }

private:
  SpaceTag() = default;

  Kind kind_ = Kind::DataEuclidean;
  Index dim_ = 0;
  std::shared_ptr<const MassMatrix> mass_;
};

/// Matrix-free linear operator between tagged inner-product spaces.
///
/// Handles declare the plain matrix-transpose action, never the adjoint;
/// adjoints are always derived through m_adjoint_apply so the mass weighting
/// cannot be silently dropped. Handles are immutable after construction and
/// apply/apply_transpose must be safe to call concurrently.
class LinearOperatorHandle {
public:
  using Apply = std::function<Vector(const Vector&)>;

  LinearOperatorHandle(SpaceTag domain, SpaceTag codomain, Apply apply,
                       Apply apply_transpose = nullptr)
      : domain_(std::move(domain)),
        codomain_(std::move(codomain)),
        apply_(std::move(apply)),
        apply_transpose_(std::move(apply_transpose)) {
    require(static_cast<bool>(apply_), "LinearOperatorHandle: apply is required");
  }

  const SpaceTag& domain() const { return domain_; }
  const SpaceTag& codomain() const { return codomain_; }

  Vector apply(const Vector& v) const {
    require(v.size() == domain_.dim(), "LinearOperatorHandle::apply: dimension mismatch");
    Vector out = apply_(v);
    require(out.size() == codomain_.dim(),
            "LinearOperatorHandle::apply: callback produced wrong dimension");
    return out;
  }

  bool has_transpose() const { return static_cast<bool>(apply_transpose_); }

  /// Action of the plain matrix transpose A^T (no inner-product weighting).
  Vector apply_transpose(const Vector& y) const {
    require(has_transpose(), "LinearOperatorHandle: apply_transpose not declared");
    require(y.size() == codomain_.dim(),
            "LinearOperatorHandle::apply_transpose: dimension mismatch");
    Vector out = apply_transpose_(y);
    require(out.size() == domain_.dim(),
            "LinearOperatorHandle::apply_transpose: callback produced wrong dimension");
    return out;
  }

private:
  SpaceTag domain_;
  SpaceTag codomain_;
  Apply apply_;
  Apply apply_transpose_;
};

/// Adjoint action consistent with the tagged inner products,
/// A* = M_dom^{-1} A^T M_cod, where the mass of a Euclidean space is the
/// identity. For a parameter-to-data map F this is F* y = M^{-1} F^T y.
Vector m_adjoint_apply(const LinearOperatorHandle& op, const Vector& y);

/// Max over `trials` seeded random pairs (u, y) of
/// |<A u, y>_cod - <u, A* y>_dom| / (||u||_dom ||y||_cod + eps).
/// Deterministic for a given seed.
double verify_adjoint(const LinearOperatorHandle& op, int trials,
                      std::uint64_t seed);

/// Assembles the operator column-by-column (column j = A e_j). Intended for
/// desk-scale oracles; refuses dimensions above the guard.
Matrix dense_assemble(const LinearOperatorHandle& op, Index guard = 5000);

}  // namespace oed
