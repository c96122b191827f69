#pragma once

#include "facered/numerics.hpp"

#include <optional>
#include <set>

namespace facered {

/// A face F = V S^k_+ Vᵀ of the PSD cone S^n_+, described by an orthonormal
/// range basis V and, optionally, by a PSD exposing matrix W with
/// kernel(W) = range(V). Stored exposing matrices are scaled to unit trace.
///
/// Faces are compared through their range projectors VVᵀ; the basis itself
/// is only determined up to rotation.
class FaceRep {
 public:
  explicit FaceRep(Matrix basis, std::optional<SymMatrix> exposing = std::nullopt);

  static FaceRep whole(Index n);
  static FaceRep trivial(Index n);

  Index ambient_n() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }
  const Matrix& basis() const { return basis_; }

  bool has_stored_exposing() const { return exposing_.has_value(); }
  /// The stored exposing matrix, or I - VVᵀ scaled to unit trace.
  SymMatrix exposing() const;
  SymMatrix projector() const;

 private:
  Matrix basis_;
  std::optional<SymMatrix> exposing_;
};

/// Face {X ⪰ 0 : ⟨W,X⟩ = 0}. Throws NotPsd when W is indefinite beyond the
/// rank cutoff.
FaceRep face_from_exposing(const SymMatrix& w,
                           std::optional<double> tol = std::nullopt);

/// Smallest face containing the PSD point X (its range).
FaceRep minimal_face_of_point(const SymMatrix& x,
                              std::optional<double> tol = std::nullopt);

/// Face exposed by the sum of the two exposing matrices.
FaceRep intersect_faces(const FaceRep& a, const FaceRep& b,
                        std::optional<double> tol = std::nullopt);

/// F^△ = S^n_+ ∩ F^⊥, spanned on the orthogonal complement of range V.
FaceRep conjugate_face(const FaceRep& f);

bool face_contains(const FaceRep& f, const SymMatrix& x, double tol = 1e-9);

/// Projector distance ‖V₁V₁ᵀ - V₂V₂ᵀ‖_F.
double face_distance(const FaceRep& a, const FaceRep& b);
bool same_face(const FaceRep& a, const FaceRep& b, double tol = 1e-8);

/// Face F_I = {x ≥ 0 : x_i = 0 for i ∈ I} of the nonnegative orthant.
struct OrthantFace {
  Index n = 0;
  std::set<Index> zero_set;

  bool contains(const Vector& x, double tol = 1e-12) const;
  /// The same face through the diagonal embedding R^n_+ → S^n_+.
  FaceRep as_psd_face() const;
};

}  // namespace facered
