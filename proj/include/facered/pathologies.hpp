#pragma once

#include "facered/conic.hpp"

#include <optional>
#include <string>
#include <vector>

namespace facered {

/// A conic problem together with what is known about it in closed form.
struct LabeledInstance {
  std::string name;
  ConicProblem problem;
  std::optional<double> v_p;
  std::optional<double> v_d;  // -inf when the dual is infeasible
  bool primal_attained = false;
  bool dual_attained = false;
  bool dual_infeasible = false;
  std::optional<Index> expected_degree;  // under the Diag finder
  std::vector<SymMatrix> feasible_points;
  std::optional<SymMatrix> primal_optimal;
  std::optional<Vector> dual_optimal;
};

/// min 0 over {X ⪰ 0 : X11 = 0} with C = [[0,1],[1,0]]: v_p = 0, dual infeasible.
LabeledInstance infinite_gap();

/// A(X) = (X33, X22 + 2X13), b = (0,1), C = e2e2ᵀ: v_p = 1, v_d = 0.
LabeledInstance positive_gap();

/// min X11 s.t. 2X12 = 1: v_p = v_d = 0, primal value not attained.
LabeledInstance zero_gap_unattained();

/// X^k = [[1/k, 1/2], [1/2, k]], feasible for zero_gap_unattained().
SymMatrix zero_gap_sequence(double k);

/// Optimal value of the positive-gap dual with right-hand side C + εP:
///   1 + ε (P11 P22 - P12²) / P11.
/// Needs P ⪰ 0 with P11 > 0 (throws NotPd otherwise) and ε > 0.
double perturbed_dual_value(const SymMatrix& p, double eps);

/// Whether some y1 makes (y1, y2) feasible for the perturbed dual, decided
/// through the leading 2×2 minor bound.
bool perturbed_dual_feasible(const SymMatrix& p, double eps, double y2);

/// {X ⪰ 0 : X11 = 1, X12 + X33 = 0, X22 = 0}.
LabeledInstance sing_two_instance();

/// {X ∈ S^n_+ : X22 = 0, X_{k+1,k+1} = X_{1,k} for k = 2..n-1};
/// the feasible set is the ray cone(e1e1ᵀ). Needs n ≥ 2.
LabeledInstance nested_sing_instance(Index n);

/// The near-feasible points X(ε) of the nested instance: first row
/// (n, ε^{1/2}, ε^{1/4}, …), diagonal (n, ε, ε^{1/2}, …).
SymMatrix nested_near_point(Index n, double eps);

/// Distance from X to the ray cone(e1e1ᵀ).
double distance_to_first_ray(const SymMatrix& x);

/// All fixtures above with default parameters, keyed by name.
std::vector<LabeledInstance> all_fixtures();

}  // namespace facered
