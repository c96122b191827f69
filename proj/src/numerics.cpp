#include "facered/numerics.hpp"

#include "facered/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <vector>

namespace facered {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "symmetric matrix must be square");
  }
  data_ = 0.5 * (m + m.transpose());
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Index>(rows.size());
  Matrix m(n, n);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != n) {
      throw Error(ErrorKind::DimensionMismatch, "ragged matrix literal");
    }
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  *this = SymMatrix(m);
}

SymMatrix SymMatrix::identity(Index n) {
  SymMatrix s(n);
  s.data_.setIdentity();
  return s;
}

SymMatrix SymMatrix::outer(const Vector& u) {
  return SymMatrix(Matrix(u * u.transpose()));
}

SymMatrix SymMatrix::unit(Index n, Index i, Index j) {
  SymMatrix s(n);
  if (i == j) {
    s.data_(i, i) = 1.0;
  } else {
    s.data_(i, j) = 0.5;
    s.data_(j, i) = 0.5;
  }
  return s;
}

void SymMatrix::set(Index i, Index j, double v) {
  data_(i, j) = v;
  data_(j, i) = v;
}

void SymMatrix::add(Index i, Index j, double v) {
  data_(i, j) += v;
  if (i != j) data_(j, i) += v;
}

SymMatrix SymMatrix::congruence(const Matrix& v) const {
  if (v.rows() != n()) {
    throw Error(ErrorKind::DimensionMismatch, "congruence basis has wrong row count");
  }
  return SymMatrix(Matrix(v.transpose() * data_ * v));
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.n() != n()) throw Error(ErrorKind::DimensionMismatch, "matrix sum");
  data_ += o.data_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  if (o.n() != n()) throw Error(ErrorKind::DimensionMismatch, "matrix difference");
  data_ -= o.data_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  data_ *= s;
  return *this;
}

double inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.n() != b.n()) throw Error(ErrorKind::DimensionMismatch, "inner product");
  return a.mat().cwiseProduct(b.mat()).sum();
}

namespace {

Spectrum jacobi_eig(const Matrix& input) {
  const Index n = input.rows();
  Matrix a = input;
  Matrix v = Matrix::Identity(n, n);
  const double scale = a.norm();
  if (scale == 0.0) return {Vector::Zero(n), v};

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Index q = 1; q < n; ++q)
      for (Index p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= 1e-17 * scale) break;

    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps) {
    throw Error(ErrorKind::IterationLimit, "Jacobi eigensolver did not converge");
  }
  return {a.diagonal(), v};
}

// Descending order, ties broken by original index; each eigenvector is
// signed so its largest-magnitude entry (earliest on ties) is positive.
Spectrum sort_descending(Spectrum s) {
  const Index n = s.values.size();
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index x, Index y) { return s.values(x) > s.values(y); });
  Spectrum out{Vector(n), Matrix(s.vectors.rows(), n)};
  for (Index k = 0; k < n; ++k) {
    out.values(k) = s.values(order[static_cast<size_t>(k)]);
    Vector col = s.vectors.col(order[static_cast<size_t>(k)]);
    Index arg = 0;
    for (Index i = 1; i < col.size(); ++i)
      if (std::abs(col(i)) > std::abs(col(arg)) * (1.0 + 1e-12)) arg = i;
    if (col.size() > 0 && col(arg) < 0.0) col = -col;
    out.vectors.col(k) = col;
  }
  return out;
}

}  // namespace

Spectrum sym_eig(const SymMatrix& m) {
  const Index n = m.n();
  if (n == 0) return {Vector(0), Matrix(0, 0)};
  if (n <= kJacobiMaxOrder) return sort_descending(jacobi_eig(m.mat()));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.mat());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::IterationLimit, "symmetric QR did not converge");
  }
  return sort_descending({solver.eigenvalues(), solver.eigenvectors()});
}

double default_rank_tol(Index n) {
  return static_cast<double>(std::max<Index>(n, 1)) * 1e-12;
}

double rank_cutoff(const Vector& values, std::optional<double> tol) {
  const double rel = tol.value_or(default_rank_tol(values.size()));
  const double top = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
  return rel * std::max(top, 1.0);
}

Index numerical_rank(std::span<const double> values, std::optional<double> tol) {
  Vector v(static_cast<Index>(values.size()));
  for (size_t i = 0; i < values.size(); ++i) v(static_cast<Index>(i)) = values[i];
  return numerical_rank(v, tol);
}

Index numerical_rank(const Vector& values, std::optional<double> tol) {
  const double cut = rank_cutoff(values, tol);
  Index r = 0;
  for (Index i = 0; i < values.size(); ++i)
    if (std::abs(values(i)) > cut) ++r;
  return r;
}

namespace {

Matrix select_columns(const Spectrum& s, double cut, bool kernel) {
  std::vector<Index> keep;
  for (Index i = 0; i < s.values.size(); ++i) {
    const bool small = std::abs(s.values(i)) <= cut;
    if (small == kernel) keep.push_back(i);
  }
  Matrix out(s.vectors.rows(), static_cast<Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k)
    out.col(static_cast<Index>(k)) = s.vectors.col(keep[k]);
  return out;
}

}  // namespace

Matrix nullspace_basis(const SymMatrix& m, std::optional<double> tol) {
  const Spectrum s = sym_eig(m);
  return select_columns(s, rank_cutoff(s.values, tol), true);
}

Matrix range_basis(const SymMatrix& m, std::optional<double> tol) {
  const Spectrum s = sym_eig(m);
  return select_columns(s, rank_cutoff(s.values, tol), false);
}

double min_eigenvalue(const SymMatrix& m) {
  if (m.n() == 0) return 0.0;
  return sym_eig(m).values(m.n() - 1);
}

double max_eigenvalue(const SymMatrix& m) {
  if (m.n() == 0) return 0.0;
  return sym_eig(m).values(0);
}

SymMatrix nearest_psd(const SymMatrix& m, bool centered) {
  SymMatrix work = m;
  if (centered) {
    const SymMatrix j = centering_projector(m.n());
    work = SymMatrix(Matrix(j.mat() * m.mat() * j.mat()));
  }
  const Spectrum s = sym_eig(work);
  const Vector clipped = s.values.cwiseMax(0.0);
  return SymMatrix(Matrix(s.vectors * clipped.asDiagonal() * s.vectors.transpose()));
}

SymMatrix best_psd_rank_k(const SymMatrix& m, Index k) {
  if (k < 0 || k > m.n()) {
    throw Error(ErrorKind::InvalidArgument, "rank must lie in [0, n]");
  }
  const Spectrum s = sym_eig(m);
  Vector kept = Vector::Zero(m.n());
  for (Index i = 0; i < k; ++i) kept(i) = std::max(s.values(i), 0.0);
  return SymMatrix(Matrix(s.vectors * kept.asDiagonal() * s.vectors.transpose()));
}

Matrix orthogonal_complement(const Matrix& v) {
  const Index n = v.rows();
  const Index k = v.cols();
  if (k == 0) return Matrix::Identity(n, n);
  if (k >= n) return Matrix(n, 0);
  Eigen::HouseholderQR<Matrix> qr(v);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - k);
}

Matrix centered_basis(Index n) {
  const Vector e = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  return orthogonal_complement(e);
}

SymMatrix centering_projector(Index n) {
  Matrix j = Matrix::Identity(n, n);
  j.array() -= 1.0 / static_cast<double>(n);
  return SymMatrix(j);
}

Vector svec(const SymMatrix& m) {
  const Index n = m.n();
  Vector v(n * (n + 1) / 2);
  Index k = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) v(k++) = i == j ? m(i, j) : std::sqrt(2.0) * m(i, j);
  return v;
}

SymMatrix smat(const Vector& v) {
  Index n = 0;
  while (n * (n + 1) / 2 < v.size()) ++n;
  if (n * (n + 1) / 2 != v.size()) {
    throw Error(ErrorKind::DimensionMismatch, "svec length is not triangular");
  }
  SymMatrix m(n);
  Index k = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) m.set(i, j, i == j ? v(k++) : v(k++) / std::sqrt(2.0));
  return m;
}

SymMatrix read_dense(std::istream& in) {
  Index n = 0;
  if (!(in >> n) || n < 0) throw Error(ErrorKind::Parse, "dense matrix: bad order");
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (!(in >> m(i, j))) throw Error(ErrorKind::Parse, "dense matrix: missing entry");
  return SymMatrix(m);
}

void write_dense(std::ostream& out, const SymMatrix& m) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  out << m.n() << '\n';
  for (Index i = 0; i < m.n(); ++i) {
    for (Index j = 0; j < m.n(); ++j) out << (j ? " " : "") << m(i, j);
    out << '\n';
  }
  out.precision(old);
}

}  // namespace facered
