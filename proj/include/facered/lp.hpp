#pragma once

#include "facered/numerics.hpp"

#include <limits>

namespace facered {

/// Dense LP:  minimize (or maximize) cᵀx
///            s.t. A_eq x = b_eq,  A_le x ≤ b_le,  x ≥ lower.
/// A lower bound of -inf makes the variable free. Empty constraint blocks may
/// be left default-constructed; `lower` defaults to all zeros when empty.
struct LpProblem {
  Vector c;
  Matrix a_eq;
  Vector b_eq;
  Matrix a_le;
  Vector b_le;
  Vector lower;
  bool maximize = false;

  Index num_vars() const { return c.size(); }
  static constexpr double kFree = -std::numeric_limits<double>::infinity();
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double value = 0.0;
  // Multipliers for the minimization form: c - A_eqᵀ y_eq - A_leᵀ y_le ≥ 0 on
  // bounded variables (= 0 on free ones), with y_le ≤ 0.
  Vector dual_eq;
  Vector dual_le;

  bool optimal() const { return status == LpStatus::Optimal; }
};

/// Two-phase primal simplex on a dense tableau with Bland's rule.
/// Throws IterationLimit if the pivot cap is hit.
LpResult solve_lp(const LpProblem& p);

}  // namespace facered
