#include "facered/conic.hpp"

#include "facered/error.hpp"
#include "facered/lp.hpp"

#include <algorithm>
#include <cmath>

namespace facered {

ConicProblem::ConicProblem(std::vector<SymMatrix> a, Vector b, SymMatrix c)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
  if (b_.size() != static_cast<Index>(a_.size())) {
    throw Error(ErrorKind::DimensionMismatch, "need one right-hand side per constraint");
  }
  for (const SymMatrix& ai : a_) {
    if (ai.n() != c_.n()) {
      throw Error(ErrorKind::DimensionMismatch, "constraint matrix order differs from C");
    }
  }
  if (!b_.allFinite()) throw Error(ErrorKind::InvalidArgument, "b has non-finite entries");
}

ConicProblem diagonal_embedding(const Matrix& a, const Vector& b, const Vector& c) {
  if (a.cols() != c.size() || a.rows() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "LP data sizes disagree");
  }
  std::vector<SymMatrix> rows;
  for (Index i = 0; i < a.rows(); ++i) {
    rows.emplace_back(Matrix(a.row(i).transpose().asDiagonal()));
  }
  return ConicProblem(std::move(rows), b, SymMatrix(Matrix(c.asDiagonal())));
}

Vector apply_A(const ConicProblem& p, const SymMatrix& x) {
  if (x.n() != p.n()) throw Error(ErrorKind::DimensionMismatch, "apply_A: order mismatch");
  Vector out(p.m());
  for (Index i = 0; i < p.m(); ++i) out(i) = inner(p.a(i), x);
  return out;
}

SymMatrix adjoint_A(const ConicProblem& p, const Vector& y) {
  if (y.size() != p.m()) throw Error(ErrorKind::DimensionMismatch, "adjoint_A: length mismatch");
  Matrix out = Matrix::Zero(p.n(), p.n());
  for (Index i = 0; i < p.m(); ++i)
    if (y(i) != 0.0) out += y(i) * p.a(i).mat();
  return SymMatrix(out);
}

namespace {

Matrix constraint_rows(const std::vector<SymMatrix>& a, Index n) {
  Matrix rows(static_cast<Index>(a.size()), n * (n + 1) / 2);
  for (size_t i = 0; i < a.size(); ++i) rows.row(static_cast<Index>(i)) = svec(a[i]).transpose();
  return rows;
}

}  // namespace

double distance_to_affine(const ConicProblem& p, const SymMatrix& x) {
  if (p.m() == 0) return 0.0;
  const Matrix rows = constraint_rows(p.a(), p.n());
  const Vector r = apply_A(p, x) - p.b();
  return rows.completeOrthogonalDecomposition().solve(r).norm();
}

std::string_view to_string(CertificateFailure f) {
  switch (f) {
    case CertificateFailure::NotPsd: return "NotPsd";
    case CertificateFailure::Zero: return "Zero";
    case CertificateFailure::BadInnerProduct: return "BadInnerProduct";
    case CertificateFailure::NonzeroImage: return "NonzeroImage";
  }
  return "?";
}

std::string_view to_string(Finder f) {
  return f == Finder::Diag ? "diag" : "dd";
}

namespace {

// Fills spectrum-based fields for a candidate exposing matrix normalized to
// unit Frobenius norm. Returns false with `reason` set when it is not a
// nonzero PSD matrix.
bool inspect_exposing(const SymMatrix& w, double tol, CertificateCheck& out) {
  const double wn = w.norm();
  if (!(wn > tol)) {
    out.reason = CertificateFailure::Zero;
    return false;
  }
  const Spectrum s = sym_eig((1.0 / wn) * w);
  out.min_eigenvalue = s.values.size() ? s.values(s.values.size() - 1) : 0.0;
  if (out.min_eigenvalue < -tol) {
    out.reason = CertificateFailure::NotPsd;
    return false;
  }
  out.exposing_rank = numerical_rank(s.values, std::max(tol, default_rank_tol(w.n())));
  if (out.exposing_rank == 0) {
    out.reason = CertificateFailure::Zero;
    return false;
  }
  return true;
}

}  // namespace

CertificateCheck check_certificate_primal(const ConicProblem& p, const Vector& y, double tol) {
  CertificateCheck out;
  out.exposing = adjoint_A(p, y);
  if (!inspect_exposing(out.exposing, tol, out)) return out;
  const double wn = out.exposing.norm();
  out.inner_residual = std::abs(p.b().dot(y)) / wn;
  if (out.inner_residual > tol * (1.0 + p.b().norm())) {
    out.reason = CertificateFailure::BadInnerProduct;
    return out;
  }
  out.valid = true;
  return out;
}

CertificateCheck check_certificate_dual(const ConicProblem& p, const SymMatrix& x, double tol) {
  CertificateCheck out;
  if (x.n() != p.n()) throw Error(ErrorKind::DimensionMismatch, "certificate order mismatch");
  out.exposing = x;
  if (!inspect_exposing(x, tol, out)) return out;
  const double xn = x.norm();
  double scale = 1.0;
  for (const SymMatrix& ai : p.a()) scale = std::max(scale, ai.norm());
  out.image_residual = apply_A(p, x).norm() / xn;
  if (out.image_residual > tol * scale) {
    out.reason = CertificateFailure::NonzeroImage;
    return out;
  }
  out.inner_residual = std::abs(inner(p.c(), x)) / xn;
  if (out.inner_residual > tol * std::max(1.0, p.c().norm())) {
    out.reason = CertificateFailure::BadInnerProduct;
    return out;
  }
  out.valid = true;
  return out;
}

std::optional<Vector> find_certificate_lp(const ConicProblem& p, Finder finder, double tol) {
  const Index n = p.n();
  const Index m = p.m();
  if (m == 0 || n == 0) return std::nullopt;

  // Entry (i,j) of A*y is coeff(i,j)·y.
  auto coeff = [&](Index i, Index j) {
    Vector row(m);
    for (Index k = 0; k < m; ++k) row(k) = p.a(k)(i, j);
    return row;
  };
  std::vector<std::pair<Index, Index>> offdiag;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < j; ++i)
      if (coeff(i, j).lpNorm<Eigen::Infinity>() > 0.0) offdiag.emplace_back(i, j);

  const Index nt = finder == Finder::DiagDominant ? static_cast<Index>(offdiag.size()) : 0;
  const Index nv = m + nt;
  std::vector<Vector> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<Vector> le_rows;

  auto padded = [&](const Vector& ycoef) {
    Vector r = Vector::Zero(nv);
    r.head(m) = ycoef;
    return r;
  };
  Vector trace_row(m);
  for (Index k = 0; k < m; ++k) trace_row(k) = p.a(k).trace();
  eq_rows.push_back(padded(p.b()));
  eq_rhs.push_back(0.0);
  eq_rows.push_back(padded(trace_row));
  eq_rhs.push_back(1.0);

  if (finder == Finder::Diag) {
    for (auto [i, j] : offdiag) {
      eq_rows.push_back(padded(coeff(i, j)));
      eq_rhs.push_back(0.0);
    }
    for (Index i = 0; i < n; ++i) le_rows.push_back(padded(-coeff(i, i)));
  } else {
    std::vector<Vector> diag_rows;
    for (Index i = 0; i < n; ++i) diag_rows.push_back(padded(-coeff(i, i)));
    for (Index t = 0; t < nt; ++t) {
      const auto [i, j] = offdiag[static_cast<size_t>(t)];
      Vector up = padded(coeff(i, j));
      up(m + t) = -1.0;
      Vector down = padded(-coeff(i, j));
      down(m + t) = -1.0;
      le_rows.push_back(up);
      le_rows.push_back(down);
      diag_rows[static_cast<size_t>(i)](m + t) += 1.0;
      diag_rows[static_cast<size_t>(j)](m + t) += 1.0;
    }
    for (auto& r : diag_rows) le_rows.push_back(r);
  }

  LpProblem lp;
  lp.c = Vector::Zero(nv);
  lp.a_eq = Matrix(static_cast<Index>(eq_rows.size()), nv);
  lp.b_eq = Vector(static_cast<Index>(eq_rows.size()));
  for (size_t r = 0; r < eq_rows.size(); ++r) {
    lp.a_eq.row(static_cast<Index>(r)) = eq_rows[r].transpose();
    lp.b_eq(static_cast<Index>(r)) = eq_rhs[r];
  }
  lp.a_le = Matrix(static_cast<Index>(le_rows.size()), nv);
  for (size_t r = 0; r < le_rows.size(); ++r) lp.a_le.row(static_cast<Index>(r)) = le_rows[r].transpose();
  lp.b_le = Vector::Zero(static_cast<Index>(le_rows.size()));
  lp.lower = Vector::Zero(nv);
  lp.lower.head(m).setConstant(LpProblem::kFree);

  const LpResult res = solve_lp(lp);
  if (!res.optimal()) return std::nullopt;
  Vector y = res.x.head(m);
  if (!check_certificate_primal(p, y, tol).valid) return std::nullopt;
  return y;
}

PrimalStep fr_step_primal(const ConicProblem& p, const Vector& y, double tol) {
  const CertificateCheck chk = check_certificate_primal(p, y, tol);
  if (!chk.valid) {
    throw Error(ErrorKind::InvalidCertificate, std::string(to_string(*chk.reason)));
  }
  PrimalStep step;
  step.exposing = chk.exposing;
  step.exposing_rank = chk.exposing_rank;
  const SymMatrix w = (1.0 / chk.exposing.norm()) * chk.exposing;
  step.basis = nullspace_basis(w, std::max(tol, default_rank_tol(w.n())));
  std::vector<SymMatrix> a;
  for (const SymMatrix& ai : p.a()) a.push_back(ai.congruence(step.basis));
  step.reduced = ConicProblem(std::move(a), p.b(), p.c().congruence(step.basis));
  return step;
}

DualStep fr_step_dual(const ConicProblem& p, const SymMatrix& x, double tol) {
  const CertificateCheck chk = check_certificate_dual(p, x, tol);
  if (!chk.valid) {
    throw Error(ErrorKind::InvalidCertificate, std::string(to_string(*chk.reason)));
  }
  const SymMatrix xs = (1.0 / x.norm()) * x;
  const double cut = std::max(tol, default_rank_tol(x.n()));
  const Matrix u = range_basis(xs, cut);
  const Matrix v = nullspace_basis(xs, cut);
  const Index ku = u.cols();
  const Index kv = v.cols();
  const Index m = p.m();

  // Rows: upper triangle of Uᵀ S U, then all of Uᵀ S V, for S = C - A*y.
  const Index rows = ku * (ku + 1) / 2 + ku * kv;
  Matrix g(rows, m);
  Vector h(rows);
  auto fill = [&](const Matrix& left, const Matrix& right, bool upper, Index& r) {
    std::vector<Matrix> blocks;
    for (Index k = 0; k < m; ++k) blocks.push_back(left.transpose() * p.a(k).mat() * right);
    const Matrix cb = left.transpose() * p.c().mat() * right;
    for (Index j = 0; j < right.cols(); ++j) {
      for (Index i = 0; i < left.cols(); ++i) {
        if (upper && i > j) continue;
        for (Index k = 0; k < m; ++k) g(r, k) = blocks[static_cast<size_t>(k)](i, j);
        h(r) = cb(i, j);
        ++r;
      }
    }
  };
  Index r = 0;
  fill(u, u, true, r);
  fill(u, v, false, r);

  DualStep step;
  step.basis = v;
  step.exposing_rank = chk.exposing_rank;
  if (m == 0) {
    step.y0 = Vector(0);
    step.directions = Matrix(0, 0);
  } else {
    step.y0 = g.completeOrthogonalDecomposition().solve(h);
    if ((g * step.y0 - h).norm() > 1e3 * tol * (1.0 + h.norm())) {
      throw Error(ErrorKind::InconsistentRow, "implicit dual equalities are inconsistent");
    }
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double top = sv.size() ? sv(0) : 0.0;
    Index rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cut * std::max(top, 1.0)) ++rank;
    step.directions = svd.matrixV().rightCols(m - rank);
  }
  step.offset = p.b().dot(step.y0);

  const SymMatrix c_reduced = (p.c() - adjoint_A(p, step.y0)).congruence(v);
  std::vector<SymMatrix> a;
  Vector b(step.directions.cols());
  for (Index j = 0; j < step.directions.cols(); ++j) {
    a.push_back(adjoint_A(p, step.directions.col(j)).congruence(v));
    b(j) = p.b().dot(step.directions.col(j));
  }
  step.reduced = ConicProblem(std::move(a), b, c_reduced);
  return step;
}

ConicProblem drop_dependent_constraints(const ConicProblem& p, double tol) {
  const Index n = p.n();
  const Index dim = n * (n + 1) / 2;
  Matrix q(dim, 0);
  std::vector<Index> kept;
  for (Index i = 0; i < p.m(); ++i) {
    const Vector a = svec(p.a(i));
    Vector r = a;
    for (int pass = 0; pass < 2; ++pass) r -= q * (q.transpose() * r);
    if (r.norm() > tol * std::max(1.0, a.norm())) {
      q.conservativeResize(Eigen::NoChange, q.cols() + 1);
      q.col(q.cols() - 1) = r / r.norm();
      kept.push_back(i);
      continue;
    }
    double predicted = 0.0;
    double mag = 0.0;
    if (!kept.empty()) {
      Matrix basis(dim, static_cast<Index>(kept.size()));
      Vector bk(static_cast<Index>(kept.size()));
      for (size_t k = 0; k < kept.size(); ++k) {
        basis.col(static_cast<Index>(k)) = svec(p.a(kept[k]));
        bk(static_cast<Index>(k)) = p.b()(kept[k]);
      }
      const Vector coef = basis.colPivHouseholderQr().solve(a);
      predicted = coef.dot(bk);
      mag = coef.cwiseAbs().dot(bk.cwiseAbs());
    }
    const double bi = p.b()(i);
    if (std::abs(bi - predicted) > std::max(tol, 1e-8) * (1.0 + std::abs(bi) + mag)) {
      throw Error(ErrorKind::InconsistentRow,
                  "constraint " + std::to_string(i + 1) + " contradicts earlier rows");
    }
  }
  std::vector<SymMatrix> a;
  Vector b(static_cast<Index>(kept.size()));
  for (size_t k = 0; k < kept.size(); ++k) {
    a.push_back(p.a(kept[k]));
    b(static_cast<Index>(k)) = p.b()(kept[k]);
  }
  return ConicProblem(std::move(a), b, p.c());
}

SymMatrix ReductionTrace::lift(const SymMatrix& z) const {
  return SymMatrix(Matrix(total_basis * z.mat() * total_basis.transpose()));
}

SymMatrix ReductionTrace::restrict(const SymMatrix& x) const {
  return x.congruence(total_basis);
}

ReductionTrace facially_reduce(const ConicProblem& p, Finder finder, Index max_steps,
                               double tol) {
  ReductionTrace trace;
  trace.original = p;
  trace.total_basis = Matrix::Identity(p.n(), p.n());
  ConicProblem cur = p;
  const Index cap = max_steps < 0 ? p.n() : max_steps;
  while (trace.witness_degree() < cap && cur.n() > 0) {
    const std::optional<Vector> y = find_certificate_lp(cur, finder, tol);
    if (!y) break;
    PrimalStep step = fr_step_primal(cur, *y, tol);
    cur = drop_dependent_constraints(step.reduced, tol);
    trace.total_basis = trace.total_basis * step.basis;
    TraceStep rec;
    rec.certificate = *y;
    rec.exposing = step.exposing;
    rec.exposing_rank = step.exposing_rank;
    rec.basis = step.basis;
    rec.new_order = cur.n();
    rec.constraints = cur.m();
    rec.snapshot = cur;
    trace.steps.push_back(std::move(rec));
  }
  trace.final = cur;
  return trace;
}

OptimalityReport check_optimality(const ConicProblem& p, const SymMatrix& x, const Vector& y,
                                  double tol) {
  OptimalityReport r;
  const SymMatrix s = p.c() - adjoint_A(p, y);
  r.primal_residual = (apply_A(p, x) - p.b()).norm();
  r.primal_min_eig = min_eigenvalue(x);
  r.dual_min_eig = min_eigenvalue(s);
  r.complementarity = inner(s, x);
  r.primal_value = inner(p.c(), x);
  r.dual_value = p.b().dot(y);
  r.gap = r.primal_value - r.dual_value;
  r.primal_feasible = r.primal_residual <= tol * (1.0 + p.b().norm()) &&
                      r.primal_min_eig >= -tol * std::max(1.0, x.norm());
  r.dual_feasible = r.dual_min_eig >= -tol * std::max(1.0, s.norm());
  const double scale = 1.0 + std::abs(r.primal_value) + std::abs(r.dual_value);
  r.weak_duality_holds = r.gap >= -tol * scale;
  r.optimal = r.primal_feasible && r.dual_feasible && std::abs(r.gap) <= tol * scale;
  return r;
}

std::optional<SymMatrix> alternating_projection_solve(const FaceRep& face,
                                                      const std::vector<SymMatrix>& a,
                                                      const Vector& b, Index iters,
                                                      double tol) {
  if (b.size() != static_cast<Index>(a.size())) {
    throw Error(ErrorKind::DimensionMismatch, "need one right-hand side per constraint");
  }
  const Matrix& v = face.basis();
  const Index k = v.cols();
  std::vector<SymMatrix> reduced;
  for (const SymMatrix& ai : a) {
    if (ai.n() != face.ambient_n()) throw Error(ErrorKind::DimensionMismatch, "order mismatch");
    reduced.push_back(ai.congruence(v));
  }
  const double target = tol * (1.0 + b.norm());
  auto lift = [&](const Vector& z) { return SymMatrix(Matrix(v * smat(z).mat() * v.transpose())); };
  if (k == 0) {
    if (b.norm() <= target) return SymMatrix(face.ambient_n());
    return std::nullopt;
  }
  const Matrix rows = constraint_rows(reduced, k);
  if (rows.rows() == 0) return lift(svec(SymMatrix(k)));
  const auto cod = rows.completeOrthogonalDecomposition();
  const Vector z0 = cod.solve(b);
  if ((rows * z0 - b).norm() > target) return std::nullopt;

  auto to_affine = [&](const Vector& z) -> Vector { return z - cod.solve(rows * z - b); };
  auto to_cone = [&](const Vector& z) { return svec(nearest_psd(smat(z))); };

  Vector x = to_cone(z0);
  Vector pa = Vector::Zero(x.size());
  Vector pc = Vector::Zero(x.size());
  for (Index it = 0; it < iters; ++it) {
    if ((rows * x - b).norm() <= target) return lift(x);
    const Vector yv = to_affine(x + pa);
    pa = x + pa - yv;
    const Vector xn = to_cone(yv + pc);
    pc = yv + pc - xn;
    x = xn;
  }
  if ((rows * x - b).norm() <= target) return lift(x);
  return std::nullopt;
}

}  // namespace facered
