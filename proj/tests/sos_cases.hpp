#pragma once

#include "facered/sos.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <utility>
#include <vector>

// Planted SOS instances shared by the unit tests and the acceptance run.
namespace facered::sos_cases {

inline double inner_v(const std::map<Exponent, double>& v, const Poly& f) {
  double s = 0.0;
  for (const auto& [e, c] : v) s += c * f.coeff(e);
  return s;
}

struct SosCase {
  std::vector<Exponent> basis;  // monomials of the squares
  Index squares;                // number of squared polynomials
  std::vector<Exponent> shift;  // monomials moved into a constraint polynomial
};

// f = Σ_k (c_kᵀ [x]_B)² with integer c_k, and its Gram matrix CᵀC on B.
inline std::pair<Poly, SymMatrix> build(const SosCase& sc, std::mt19937& rng) {
  const int n = static_cast<int>(sc.basis[0].size());
  const Index k = static_cast<Index>(sc.basis.size());
  std::uniform_int_distribution<int> coef(-3, 3);
  Matrix c(sc.squares, k);
  for (;;) {
    for (Index i = 0; i < c.size(); ++i) c.data()[i] = coef(rng);
    if (Eigen::FullPivLU<Matrix>(c).rank() == std::min(sc.squares, k)) break;
  }
  Poly f(n);
  for (Index r = 0; r < sc.squares; ++r) {
    Poly p(n);
    for (Index j = 0; j < k; ++j) p.add_term(sc.basis[static_cast<size_t>(j)], c(r, j));
    f = f + p * p;
  }
  return {f, SymMatrix(Matrix(c.transpose() * c))};
}

// Gram on `basis` embedded into the ordering of `m` (which must contain it).
inline std::optional<SymMatrix> embed(const SymMatrix& q, const std::vector<Exponent>& basis, const MonomialSet& m) {
  const std::vector<Exponent> order(m.begin(), m.end());
  std::vector<Index> pos;
  for (const Exponent& e : basis) {
    const auto it = std::find(order.begin(), order.end(), e);
    if (it == order.end()) return std::nullopt;
    pos.push_back(it - order.begin());
  }
  SymMatrix out(static_cast<Index>(order.size()));
  for (size_t a = 0; a < basis.size(); ++a)
    for (size_t b = 0; b < basis.size(); ++b)
      out.set(pos[a], pos[b], q(static_cast<Index>(a), static_cast<Index>(b)));
  return out;
}

inline std::vector<SosCase> crafted_cases() {
  return {
      {{{1}, {2}}, 2, {}},
      {{{0}, {1}, {2}}, 3, {}},
      {{{1}, {3}}, 2, {}},
      {{{0}, {3}}, 1, {}},
      {{{2}, {3}, {5}}, 2, {}},
      {{{1, 0}, {0, 1}}, 1, {}},
      {{{1, 0}, {0, 1}}, 2, {}},
      {{{0, 0}, {1, 0}, {0, 1}}, 3, {}},
      {{{2, 0}, {1, 1}, {0, 2}}, 3, {}},
      {{{2, 0}, {0, 2}}, 2, {}},
      {{{0, 0}, {1, 1}, {2, 2}}, 2, {}},
      {{{1, 2}, {2, 1}, {0, 0}}, 3, {}},
      {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 2, {}},
      {{{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}, 3, {}},
      {{{0, 0, 0}, {1, 1, 1}}, 2, {}},
      {{{2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 1, 0}}, 4, {}},
      {{{1}, {2}}, 2, {{2}}},
      {{{0, 0}, {1, 1}}, 2, {{1, 1}}},
      {{{1, 0}, {0, 1}, {1, 1}}, 3, {{2, 2}, {1, 1}}},
      {{{0, 0, 0}, {1, 0, 0}, {0, 1, 1}}, 3, {{0, 0, 0}}},
  };
}

}  // namespace facered::sos_cases
