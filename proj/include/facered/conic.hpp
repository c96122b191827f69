#pragma once

#include "facered/cones.hpp"
#include "facered/numerics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace facered {

/// Primal-dual pair over S^n_+:
///   (P)  min ⟨C,X⟩  s.t. ⟨A_i,X⟩ = b_i,  X ⪰ 0
///   (D)  max bᵀy    s.t. C - Σ y_i A_i ⪰ 0.
/// LPs enter through diagonal_embedding.
class ConicProblem {
 public:
  ConicProblem() = default;
  ConicProblem(std::vector<SymMatrix> a, Vector b, SymMatrix c);

  Index n() const { return c_.n(); }
  Index m() const { return static_cast<Index>(a_.size()); }
  const std::vector<SymMatrix>& a() const { return a_; }
  const SymMatrix& a(Index i) const { return a_[static_cast<size_t>(i)]; }
  const Vector& b() const { return b_; }
  const SymMatrix& c() const { return c_; }

  friend bool operator==(const ConicProblem& x, const ConicProblem& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && x.c_ == y.c_;
  }

 private:
  std::vector<SymMatrix> a_;
  Vector b_;
  SymMatrix c_;
};

/// LP  min cᵀx s.t. Ax = b, x ≥ 0  as an SDP on diagonal matrices.
ConicProblem diagonal_embedding(const Matrix& a, const Vector& b, const Vector& c);

Vector apply_A(const ConicProblem& p, const SymMatrix& x);
SymMatrix adjoint_A(const ConicProblem& p, const Vector& y);

/// Frobenius distance from X to the affine set {X : A(X) = b}.
double distance_to_affine(const ConicProblem& p, const SymMatrix& x);

enum class CertificateFailure { NotPsd, Zero, BadInnerProduct, NonzeroImage };

std::string_view to_string(CertificateFailure f);

struct CertificateCheck {
  bool valid = false;
  std::optional<CertificateFailure> reason;
  SymMatrix exposing;   // A*y for primal certificates, X for dual ones
  Index exposing_rank = 0;
  double min_eigenvalue = 0.0;
  double inner_residual = 0.0;  // |⟨b,y⟩| or |⟨C,X⟩|
  double image_residual = 0.0;  // ‖A(X)‖ (dual certificates only)
};

/// 0 ≠ A*y ⪰ 0 with ⟨b,y⟩ = 0.
CertificateCheck check_certificate_primal(const ConicProblem& p, const Vector& y,
                                          double tol = 1e-9);
/// 0 ≠ X ⪰ 0 with A(X) = 0 and ⟨C,X⟩ = 0.
CertificateCheck check_certificate_dual(const ConicProblem& p, const SymMatrix& x,
                                        double tol = 1e-9);

/// Polyhedral inner approximations of S^n_+ used to search for primal
/// certificates by linear programming.
enum class Finder { Diag, DiagDominant };

std::string_view to_string(Finder f);

/// Searches for y with A*y in the chosen polyhedral cone, ⟨b,y⟩ = 0 and
/// trace(A*y) = 1. An empty result only means the relaxation failed.
std::optional<Vector> find_certificate_lp(const ConicProblem& p, Finder finder,
                                          double tol = 1e-9);

struct PrimalStep {
  ConicProblem reduced;  // data VᵀA_iV, VᵀCV, same b
  Matrix basis;          // V, n×(n-r)
  SymMatrix exposing;    // A*y
  Index exposing_rank = 0;
};

PrimalStep fr_step_primal(const ConicProblem& p, const Vector& y, double tol = 1e-9);

/// The dual restricted by a dual certificate X: slacks live on the face
/// exposed by X, so Uᵀ(C - A*y)[U V] = 0 for U spanning range(X) and V its
/// complement. Those equalities are solved as y = y0 + N t, leaving
///   max bᵀy0 + (Nᵀb)ᵀt  s.t.  Vᵀ(C - A*y0)V - Σ t_j Vᵀ(A*N_j)V ⪰ 0,
/// which is the dual of `reduced`.
struct DualStep {
  ConicProblem reduced;
  Matrix basis;       // V
  Vector y0;
  Matrix directions;  // N
  double offset = 0.0;  // bᵀy0
  Index exposing_rank = 0;

  Vector recover_y(const Vector& t) const { return y0 + directions * t; }
};

DualStep fr_step_dual(const ConicProblem& p, const SymMatrix& x, double tol = 1e-9);

/// Drops constraints whose vectorized data is a combination of earlier
/// rows. Throws InconsistentRow when the right-hand side disagrees.
ConicProblem drop_dependent_constraints(const ConicProblem& p, double tol = 1e-9);

struct TraceStep {
  Vector certificate;
  SymMatrix exposing;
  Index exposing_rank = 0;
  Matrix basis;  // local face basis, rows index the previous order
  Index new_order = 0;
  Index constraints = 0;
  ConicProblem snapshot;
};

struct ReductionTrace {
  std::vector<TraceStep> steps;
  ConicProblem original;
  ConicProblem final;
  Matrix total_basis;  // composition of all local bases, n×k

  /// Number of reduction steps taken; not a certified singularity degree.
  Index witness_degree() const { return static_cast<Index>(steps.size()); }
  /// Face of the original cone that contains the feasible region.
  FaceRep face() const { return FaceRep(total_basis); }
  SymMatrix lift(const SymMatrix& z) const;
  SymMatrix restrict(const SymMatrix& x) const;
};

ReductionTrace facially_reduce(const ConicProblem& p, Finder finder,
                               Index max_steps = -1, double tol = 1e-9);

struct OptimalityReport {
  double primal_residual = 0.0;  // ‖A(X) - b‖
  double primal_min_eig = 0.0;
  double dual_min_eig = 0.0;     // of C - A*y
  double complementarity = 0.0;  // ⟨C - A*y, X⟩
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;  // ⟨C,X⟩ - bᵀy
  bool primal_feasible = false;
  bool dual_feasible = false;
  bool weak_duality_holds = false;
  bool optimal = false;
};

OptimalityReport check_optimality(const ConicProblem& p, const SymMatrix& x,
                                  const Vector& y, double tol = 1e-8);

/// Dykstra's alternating projections between the face V S^k_+ Vᵀ and the
/// affine set {X : ⟨A_i,X⟩ = b_i}, carried out in face coordinates.
std::optional<SymMatrix> alternating_projection_solve(const FaceRep& face,
                                                      const std::vector<SymMatrix>& a,
                                                      const Vector& b,
                                                      Index iters = 20000,
                                                      double tol = 1e-10);

}  // namespace facered
