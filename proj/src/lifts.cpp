#include "facered/lifts.hpp"

#include "facered/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/KroneckerProduct>

namespace facered {

double IndexConstraint::evaluate(const SymMatrix& y) const {
  double s = 0.0;
  for (const Term& t : terms) s += t.coeff * y(t.a, t.b);
  return s - rhs;
}

namespace {

void require_square(const Matrix& m, Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be " + std::to_string(n) + "x" +
                                                  std::to_string(n));
  }
}

Index svec_pos(Index i, Index j) {
  if (i > j) std::swap(i, j);
  return j * (j + 1) / 2 + i;
}

double svec_scale(Index i, Index j) { return i == j ? 1.0 : std::sqrt(2.0); }

SymMatrix constraint_matrix(const IndexConstraint& c, Index order) {
  SymMatrix a(order);
  for (const auto& t : c.terms) a += t.coeff * SymMatrix::unit(order, t.a, t.b);
  return a;
}

ConicProblem restrict_constraints(const std::vector<IndexConstraint>& cons, const SymMatrix& objective,
                                  const Matrix& v) {
  std::vector<SymMatrix> a;
  Vector b(static_cast<Index>(cons.size()));
  for (size_t k = 0; k < cons.size(); ++k) {
    a.push_back(constraint_matrix(cons[k], v.rows()).congruence(v));
    b(static_cast<Index>(k)) = cons[k].rhs;
  }
  return drop_dependent_constraints(ConicProblem(std::move(a), b, objective.congruence(v)));
}

// Columns of `rows` (as functionals) kept by Gram–Schmidt in order.
std::vector<size_t> independent_in_order(const std::vector<Vector>& rows, double tol) {
  std::vector<Vector> q;
  std::vector<size_t> keep;
  for (size_t k = 0; k < rows.size(); ++k) {
    Vector r = rows[k];
    const double scale = std::max(r.norm(), 1.0);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& u : q) r -= u.dot(r) * u;
    if (r.norm() > tol * scale) {
      q.push_back(r / r.norm());
      keep.push_back(k);
    }
  }
  return keep;
}

}  // namespace

SymMatrix affine_hull_exposing(const Matrix& l_mat, const Vector& l) {
  if (l_mat.rows() != l.size()) throw Error(ErrorKind::DimensionMismatch, "L and l row counts differ");
  Matrix lhat(l_mat.rows(), l_mat.cols() + 1);
  lhat << -l, l_mat;
  return SymMatrix(Matrix(lhat.transpose() * lhat));
}

SymMatrix rank_one_lift(const Vector& y) {
  Vector u(y.size() + 1);
  u << 1.0, y;
  return SymMatrix::outer(u);
}

SymMatrix laplacian(const Matrix& weights) {
  require_square(weights, weights.rows(), "weights");
  Matrix w = weights;
  w.diagonal().setZero();
  if ((w - w.transpose()).norm() > 1e-12 * std::max(1.0, w.norm())) {
    throw Error(ErrorKind::InvalidArgument, "weights must be symmetric");
  }
  return SymMatrix(Matrix(Matrix((w * Vector::Ones(w.rows())).asDiagonal()) - w));
}

Matrix maxcut_e(Index n) {
  const Index t = n * (n + 1) / 2;
  Matrix e = Matrix::Zero(t + 1, n);
  for (Index i = 0; i < n; ++i) {
    e(0, i) = -1.0;
    e(1 + svec_pos(i, i), i) = 1.0;
  }
  return e;
}

SymMatrix lift_cut(const Vector& x) {
  for (Index i = 0; i < x.size(); ++i)
    if (x(i) != 1.0 && x(i) != -1.0) throw Error(ErrorKind::InvalidArgument, "cut entries must be ±1");
  return rank_one_lift(svec(SymMatrix::outer(x)));
}

double cut_value(const Matrix& weights, const Vector& x) {
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i)
    for (Index j = i + 1; j < x.size(); ++j) s += weights(i, j) * (1.0 - x(i) * x(j));
  return 0.5 * s;
}

LiftedProblem maxcut_second_lift(const Matrix& weights) {
  const Index n = weights.rows();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "max-cut needs n >= 2");
  const SymMatrix lap = laplacian(weights);
  LiftedProblem out;
  out.order = n * (n + 1) / 2 + 1;
  const Vector half = 0.125 * svec(lap);
  Matrix obj = Matrix::Zero(out.order, out.order);
  obj.block(1, 0, out.order - 1, 1) = half;
  obj.block(0, 1, 1, out.order - 1) = half.transpose();
  out.objective = SymMatrix(obj);
  const Matrix e = maxcut_e(n);
  out.exposing = SymMatrix(Matrix(e * e.transpose()));
  out.basis = nullspace_basis(out.exposing);

  out.constraints.push_back({{{0, 0, 1.0}}, 1.0});
  for (Index i = 0; i < n; ++i) out.constraints.push_back({{{0, 1 + svec_pos(i, i), 1.0}}, 1.0});
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      for (Index k = i; k < n; ++k) {
        // X_ij X_jk − X_ik = 0 in terms of y = svec(X).
        IndexConstraint c;
        c.terms.push_back({1 + svec_pos(i, j), 1 + svec_pos(j, k), 1.0 / (svec_scale(i, j) * svec_scale(j, k))});
        c.terms.push_back({0, 1 + svec_pos(i, k), -1.0 / svec_scale(i, k)});
        out.constraints.push_back(std::move(c));
      }
    }
  }
  out.reduced = restrict_constraints(out.constraints, out.objective, out.basis);
  return out;
}

SymMatrix qap_objective(const Matrix& f, const Matrix& d, const Matrix& c) {
  const Index n = f.rows();
  require_square(f, n, "F");
  require_square(d, n, "D");
  require_square(c, n, "C");
  const Index n2 = n * n;
  Matrix l = Matrix::Zero(n2 + 1, n2 + 1);
  const Vector vc = Eigen::Map<const Vector>(c.data(), n2);
  l.block(1, 0, n2, 1) = 0.5 * vc;
  l.block(0, 1, 1, n2) = 0.5 * vc.transpose();
  l.bottomRightCorner(n2, n2) = Eigen::kroneckerProduct(d, f);
  return SymMatrix(l);
}

double qap_value(const Matrix& f, const Matrix& d, const Matrix& c, const Matrix& x) {
  return (f * x * d * x.transpose()).trace() + (c * x.transpose()).trace();
}

AssignmentExposing qap_assignment_exposing(Index n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "QAP needs n >= 2");
  const Index n2 = n * n;
  AssignmentExposing out;
  out.e_r = Matrix::Zero(n2 + 1, n);
  out.e_c = Matrix::Zero(n2 + 1, n);
  for (Index i = 0; i < n; ++i) {
    out.e_r(0, i) = -1.0;
    out.e_c(0, i) = -1.0;
    for (Index k = 0; k < n; ++k) {
      out.e_r(1 + k * n + i, i) = 1.0;  // vec(e_i eᵀ): row i of X
      out.e_c(1 + i * n + k, i) = 1.0;  // vec(e e_iᵀ): column i of X
    }
  }
  out.d0 = SymMatrix(Matrix(out.e_r * out.e_r.transpose() + out.e_c * out.e_c.transpose()));
  return out;
}

Matrix qap_face_basis(Index n) { return nullspace_basis(qap_assignment_exposing(n).d0); }

std::vector<std::pair<Index, Index>> gangster_pattern(Index n) {
  std::vector<std::pair<Index, Index>> out{{0, 0}};
  auto pos = [n](Index col, Index row) { return 1 + col * n + row; };
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k)
      for (Index l = k + 1; l < n; ++l) out.emplace_back(pos(i, k), pos(i, l));
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      for (Index k = 0; k < n; ++k) out.emplace_back(pos(i, k), pos(j, k));
  return out;
}

std::vector<std::pair<Index, Index>> gangster_index_set(Index n) {
  const Matrix v = qap_face_basis(n);
  const auto pattern = gangster_pattern(n);
  std::vector<Vector> rows;
  for (const auto& [a, b] : pattern) rows.push_back(svec(SymMatrix::unit(v.rows(), a, b).congruence(v)));
  std::vector<std::pair<Index, Index>> out;
  for (size_t k : independent_in_order(rows, 1e-9)) out.push_back(pattern[k]);
  return out;
}

Index qap_unreduced_constraint_count(Index n) {
  return 1 + n + n * (n - 1) / 2 + n * n + 2 * (n * (n * (n - 1) / 2)) + 1;
}

LiftedProblem qap_reduced(const Matrix& f, const Matrix& d, const Matrix& c) {
  const Index n = f.rows();
  LiftedProblem out;
  const SymMatrix l = qap_objective(f, d, c);
  out.order = n * n + 1;
  out.objective = l;
  out.exposing = qap_assignment_exposing(n).d0;
  out.basis = nullspace_basis(out.exposing);
  for (const auto& [a, b] : gangster_index_set(n)) {
    out.constraints.push_back({{{a, b, 1.0}}, (a == 0 && b == 0) ? 1.0 : 0.0});
  }
  std::vector<SymMatrix> a;
  Vector rhs(static_cast<Index>(out.constraints.size()));
  for (size_t k = 0; k < out.constraints.size(); ++k) {
    a.push_back(constraint_matrix(out.constraints[k], out.order).congruence(out.basis));
    rhs(static_cast<Index>(k)) = out.constraints[k].rhs;
  }
  out.reduced = ConicProblem(std::move(a), rhs, l.congruence(out.basis));
  return out;
}

SymMatrix lift_permutation(const Matrix& x) {
  const Index n = x.rows();
  if (x.cols() != n) throw Error(ErrorKind::NotPermutation, "permutation matrix must be square");
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (x(i, j) != 0.0 && x(i, j) != 1.0) throw Error(ErrorKind::NotPermutation, "entries must be 0 or 1");
    }
  }
  if ((x * Vector::Ones(n) - Vector::Ones(n)).norm() != 0.0 ||
      (x.transpose() * Vector::Ones(n) - Vector::Ones(n)).norm() != 0.0) {
    throw Error(ErrorKind::NotPermutation, "row and column sums must be 1");
  }
  return rank_one_lift(Eigen::Map<const Vector>(x.data(), n * n));
}

SymMatrix reduce_lift(const SymMatrix& y, const Matrix& v) {
  if (y.n() != v.rows()) throw Error(ErrorKind::DimensionMismatch, "lift and basis orders differ");
  return y.congruence(v);
}

std::vector<Matrix> all_permutations(Index n) {
  std::vector<Index> p(static_cast<size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  std::vector<Matrix> out;
  do {
    Matrix x = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) x(i, p[static_cast<size_t>(i)]) = 1.0;
    out.push_back(x);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

}  // namespace facered
