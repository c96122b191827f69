#pragma once

#include "facered/conic.hpp"
#include "facered/numerics.hpp"

#include <vector>

namespace facered {

/// Σ coeff·Y_ab = rhs on the lifted matrix.
struct IndexConstraint {
  struct Term {
    Index a;
    Index b;
    double coeff;
  };
  std::vector<Term> terms;
  double rhs = 0.0;
  double evaluate(const SymMatrix& y) const;
};

struct LiftedProblem {
  Index order = 0;      // N, order of the lifted matrix Y
  SymMatrix objective;  // ⟨objective, Y⟩ is the lifted cost
  SymMatrix exposing;   // W₀ ⪰ 0
  Matrix basis;         // V̂, orthonormal kernel basis of W₀
  std::vector<IndexConstraint> constraints;
  /// The problem restricted to the face: data V̂ᵀ(·)V̂, independent rows only.
  ConicProblem reduced;
};

/// L̂ᵀL̂ with L̂ = [−l  L]; annihilates (1; x)(1; x)ᵀ whenever Lx = l.
SymMatrix affine_hull_exposing(const Matrix& l_mat, const Vector& l);

/// (1; y)(1; y)ᵀ.
SymMatrix rank_one_lift(const Vector& y);

/// Weighted Laplacian Diag(We) − W of a symmetric weight matrix.
SymMatrix laplacian(const Matrix& weights);

/// Second lift of max-cut on y = svec(X): order n(n+1)/2 + 1, W₀ = EEᵀ with
/// E columns (−1; svec(Diag(eᵢ))), objective ⟨·, Y⟩ = ¼⟨Lap, X⟩ on rank-one
/// lifts, and the constraints Y₀₀ = 1, diag(X) = e and X_ij X_jk = X_ik.
LiftedProblem maxcut_second_lift(const Matrix& weights);

/// The E matrix of the second lift.
Matrix maxcut_e(Index n);

/// Lift of a ±1 cut vector through X = xxᵀ, y = svec(X).
SymMatrix lift_cut(const Vector& x);

/// ½ Σ_{i<j} w_ij (1 − x_i x_j).
double cut_value(const Matrix& weights, const Vector& x);

/// L = [[0, ½vec(C)ᵀ], [½vec(C), D⊗F]] of order n²+1 (vec is column-major).
SymMatrix qap_objective(const Matrix& f, const Matrix& d, const Matrix& c);

/// trace(F X D Xᵀ) + trace(C Xᵀ).
double qap_value(const Matrix& f, const Matrix& d, const Matrix& c, const Matrix& x);

struct AssignmentExposing {
  Matrix e_r;  // (n²+1)×n, columns (−1; vec(eᵢeᵀ))
  Matrix e_c;  // (n²+1)×n, columns (−1; vec(eeᵢᵀ))
  SymMatrix d0;
};
AssignmentExposing qap_assignment_exposing(Index n);

/// Orthonormal basis of null(D₀): (n²+1)×((n−1)²+1).
Matrix qap_face_basis(Index n);

/// Gangster positions (a, b), a ≤ b, in the lifted matrix: (0,0), strict
/// upper entries of the diagonal blocks, diagonal entries of strict upper
/// off-diagonal blocks, with dependent functionals on the face removed in
/// that order. Size n³ − 2n² + 1.
std::vector<std::pair<Index, Index>> gangster_index_set(Index n);

/// Full gangster pattern before removing dependent positions.
std::vector<std::pair<Index, Index>> gangster_pattern(Index n);

/// Number of linear constraints of the unreduced relaxation: n³ + n²/2 + n/2 + 2.
Index qap_unreduced_constraint_count(Index n);

/// Reduced QAP relaxation: order (n−1)²+1, objective V̂ᵀLV̂,
/// constraints (V̂RV̂ᵀ)_ab = [a = b = 0] over J̄.
LiftedProblem qap_reduced(const Matrix& f, const Matrix& d, const Matrix& c);

/// (1; vec X)(1; vec X)ᵀ. Throws NotPermutation unless X is a 0/1 permutation.
SymMatrix lift_permutation(const Matrix& x);

/// V̂ᵀ Y V̂.
SymMatrix reduce_lift(const SymMatrix& y, const Matrix& v);

/// All n! permutation matrices in lexicographic order.
std::vector<Matrix> all_permutations(Index n);

}  // namespace facered
