#include "facered/pathologies.hpp"

#include "facered/error.hpp"

#include <cmath>
#include <limits>

namespace facered {

namespace {

SymMatrix e(Index n, Index i) { return SymMatrix::unit(n, i, i); }

// e_i e_jᵀ + e_j e_iᵀ
SymMatrix twice_sym(Index n, Index i, Index j) { return 2.0 * SymMatrix::unit(n, i, j); }

}  // namespace

LabeledInstance infinite_gap() {
  LabeledInstance li;
  li.name = "infinite-gap";
  li.problem = ConicProblem({e(2, 0)}, Vector::Zero(1), SymMatrix{{0, 1}, {1, 0}});
  li.v_p = 0.0;
  li.v_d = -std::numeric_limits<double>::infinity();
  li.primal_attained = true;
  li.dual_infeasible = true;
  li.feasible_points = {SymMatrix(2), e(2, 1)};
  li.primal_optimal = SymMatrix(2);
  li.expected_degree = 1;
  return li;
}

LabeledInstance positive_gap() {
  LabeledInstance li;
  li.name = "positive-gap";
  Vector b(2);
  b << 0.0, 1.0;
  li.problem = ConicProblem({e(3, 2), e(3, 1) + twice_sym(3, 0, 2)}, b, e(3, 1));
  li.v_p = 1.0;
  li.v_d = 0.0;
  li.primal_attained = true;
  li.dual_attained = true;
  li.primal_optimal = e(3, 1);
  li.dual_optimal = Vector::Zero(2);
  li.feasible_points = {e(3, 1), e(3, 1) + 5.0 * e(3, 0)};
  li.expected_degree = 1;
  return li;
}

SymMatrix zero_gap_sequence(double k) { return SymMatrix{{1.0 / k, 0.5}, {0.5, k}}; }

LabeledInstance zero_gap_unattained() {
  LabeledInstance li;
  li.name = "zero-gap";
  li.problem = ConicProblem({SymMatrix{{0, 1}, {1, 0}}}, Vector::Ones(1), e(2, 0));
  li.v_p = 0.0;
  li.v_d = 0.0;
  li.primal_attained = false;
  li.dual_attained = true;
  li.dual_optimal = Vector::Zero(1);
  for (double k : {1.0, 10.0, 100.0}) li.feasible_points.push_back(zero_gap_sequence(k));
  li.expected_degree = 0;
  return li;
}

double perturbed_dual_value(const SymMatrix& p, double eps) {
  if (p.n() != 3) throw Error(ErrorKind::DimensionMismatch, "perturbation must be 3x3");
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  if (!(p(0, 0) > 0.0) || min_eigenvalue(p) < -1e-12 * std::max(1.0, p.norm())) {
    throw Error(ErrorKind::NotPd, "perturbation must be PSD with P11 > 0");
  }
  return 1.0 + eps * (p(0, 0) * p(1, 1) - p(0, 1) * p(0, 1)) / p(0, 0);
}

bool perturbed_dual_feasible(const SymMatrix& p, double eps, double y2) {
  // Leading 2×2 minor of C - y2 A2 + εP, times 1/ε.
  const double minor = p(0, 0) * (1.0 - y2) + eps * (p(0, 0) * p(1, 1) - p(0, 1) * p(0, 1));
  return minor >= 0.0;
}

LabeledInstance sing_two_instance() {
  LabeledInstance li;
  li.name = "sing-two";
  Vector b(3);
  b << 1.0, 0.0, 0.0;
  const SymMatrix a2 = SymMatrix::unit(3, 0, 1) + e(3, 2);
  li.problem = ConicProblem({e(3, 0), a2, e(3, 1)}, b, SymMatrix(3));
  li.feasible_points = {e(3, 0)};
  li.expected_degree = 2;
  li.v_p = 0.0;
  li.primal_attained = true;
  return li;
}

LabeledInstance nested_sing_instance(Index n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "nested instance needs n >= 2");
  LabeledInstance li;
  li.name = "nested-" + std::to_string(n);
  std::vector<SymMatrix> a{e(n, 1)};
  for (Index k = 1; k + 1 < n; ++k) a.push_back(e(n, k + 1) - SymMatrix::unit(n, 0, k));
  li.problem = ConicProblem(std::move(a), Vector::Zero(n - 1), SymMatrix(n));
  li.feasible_points = {e(n, 0), 3.0 * e(n, 0)};
  li.expected_degree = n - 1;
  li.v_p = 0.0;
  li.primal_attained = true;
  return li;
}

SymMatrix nested_near_point(Index n, double eps) {
  SymMatrix x(n);
  x.set(0, 0, static_cast<double>(n));
  for (Index k = 1; k < n; ++k) {
    x.set(0, k, std::pow(eps, std::pow(2.0, -static_cast<double>(k))));
    x.set(k, k, std::pow(eps, std::pow(2.0, -static_cast<double>(k - 1))));
  }
  return x;
}

double distance_to_first_ray(const SymMatrix& x) {
  const double t = std::max(x(0, 0), 0.0);
  const double sq = x.norm() * x.norm() - 2.0 * t * x(0, 0) + t * t;
  return std::sqrt(std::max(sq, 0.0));
}

std::vector<LabeledInstance> all_fixtures() {
  return {infinite_gap(), positive_gap(), zero_gap_unattained(), sing_two_instance(),
          nested_sing_instance(3), nested_sing_instance(4)};
}

}  // namespace facered
