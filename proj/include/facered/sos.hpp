#pragma once

#include "facered/conic.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace facered {

using Exponent = std::vector<int>;

/// Sparse polynomial in n variables: exponent → nonzero coefficient.
class Poly {
 public:
  Poly() = default;
  explicit Poly(int n) : n_(n) {}
  Poly(int n, std::map<Exponent, double> terms);

  int n() const { return n_; }
  const std::map<Exponent, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  double coeff(const Exponent& e) const;
  void add_term(const Exponent& e, double c);

  static Poly monomial(const Exponent& e, double c = 1.0);

  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(double s, const Poly& a);
  bool operator==(const Poly&) const = default;

 private:
  int n_ = 0;
  std::map<Exponent, double> terms_;
};

using MonomialSet = std::set<Exponent>;

int degree(const Exponent& e);
Exponent operator+(const Exponent& a, const Exponent& b);

/// {α : 2α ∈ conv(∪ supports)}; lattice points by bounding box, membership
/// by LP. Throws ZeroPolynomial when every polynomial is zero.
MonomialSet initial_support(const std::vector<Poly>& polys);
MonomialSet initial_support(const Poly& f);

/// Whether p lies in conv(points) (LP feasibility).
bool in_hull(const Exponent& p, const std::vector<Exponent>& points, double scale = 1.0);

/// M minus the midpoints (β+γ)/2 of distinct β, γ ∈ M.
MonomialSet m_plus(const MonomialSet& m);

/// {β + γ : β, γ ∈ M}.
MonomialSet m_sum(const MonomialSet& m);

/// conv(M) ∩ ℕⁿ = M.
bool is_type1(const MonomialSet& m);

struct EliminationStep {
  std::map<Exponent, double> v;  // exposing vector in coefficient space
  MonomialSet removed;           // I = {α ∈ M⁺ : λ_{2α} > 1e-9}
};

/// LP over Λ = Σ(M)⊥ + cone{e_{2α} : α ∈ M⁺}: free p_γ for γ in the support
/// of the data outside M+M, λ ≥ 0 with Σλ = 1, ⟨v, gᵢ⟩ = 0 for all i ≥ 0.
std::optional<EliminationStep> elimination_step(const MonomialSet& m, const Poly& g0,
                                                const std::vector<Poly>& gs);

struct EliminationResult {
  MonomialSet initial;
  MonomialSet final;
  std::vector<EliminationStep> steps;
};

/// initial_support of the data, then elimination_step until it fails.
EliminationResult eliminate(const Poly& g0, const std::vector<Poly>& gs, int max_iters = -1);

/// Coefficient matching f = [x]_Mᵀ Q [x]_M as a conic problem in Q (C = 0):
/// one row per monomial of M+M ∪ supp(f), ⟨A_γ, Q⟩ = Σ_{α+β=γ} Q_αβ = f_γ.
/// Rows follow the exponent order; Q is indexed in the order of M.
ConicProblem gram_system(const Poly& f, const MonomialSet& m);

/// Coefficient residual ≤ tol and λ_min(Q) ≥ −tol.
bool verify_gram(const Poly& f, const MonomialSet& m, const SymMatrix& q, double tol = 1e-9);

struct SosInput {
  Poly g0;
  std::vector<Poly> gs;
};

/// "poly 1", "n <vars>", then "coeff e1 … en" lines for g₀; each further
/// "constraint" line starts the next gᵢ.
SosInput read_poly(std::istream& in);
void write_poly(std::ostream& out, const SosInput& in);
void write_monomials(std::ostream& out, const MonomialSet& m);

}  // namespace facered
