#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <span>

namespace facered {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real symmetric matrix. Any input is symmetrized on construction,
/// so entry (i,j) and (j,i) are always bit-identical.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index n) : data_(Matrix::Zero(n, n)) {}
  explicit SymMatrix(const Matrix& m);
  SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SymMatrix identity(Index n);
  static SymMatrix zero(Index n) { return SymMatrix(n); }
  static SymMatrix outer(const Vector& u);  // u uᵀ
  static SymMatrix unit(Index n, Index i, Index j);  // e_i e_jᵀ symmetrized

  Index n() const { return data_.rows(); }
  const Matrix& mat() const { return data_; }
  double operator()(Index i, Index j) const { return data_(i, j); }

  // Writes both (i,j) and (j,i).
  void set(Index i, Index j, double v);
  void add(Index i, Index j, double v);

  double trace() const { return data_.trace(); }
  double norm() const { return data_.norm(); }

  /// Congruence Vᵀ M V.
  SymMatrix congruence(const Matrix& v) const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.data_.rows() == b.data_.rows() && a.data_ == b.data_;
  }

 private:
  Matrix data_;
};

/// Trace inner product ⟨A,B⟩.
double inner(const SymMatrix& a, const SymMatrix& b);

struct Spectrum {
  Vector values;   // descending
  Matrix vectors;  // orthonormal columns matching `values`
};

/// Symmetric eigendecomposition. Cyclic Jacobi up to order 64, tridiagonal
/// QR with implicit shifts above that.
Spectrum sym_eig(const SymMatrix& m);

inline constexpr Index kJacobiMaxOrder = 64;

/// Default relative rank threshold: n·1e-12.
double default_rank_tol(Index n);

/// Number of values with |v| > tol·max(|v_max|, 1). `values` need not be
/// sorted. When tol is absent the default policy for `values.size()` applies.
Index numerical_rank(std::span<const double> values,
                     std::optional<double> tol = std::nullopt);
Index numerical_rank(const Vector& values,
                     std::optional<double> tol = std::nullopt);

/// Absolute cutoff implied by the rank policy for a given spectrum.
double rank_cutoff(const Vector& values, std::optional<double> tol);

/// Orthonormal basis of the numerical kernel of M (columns).
Matrix nullspace_basis(const SymMatrix& m,
                       std::optional<double> tol = std::nullopt);

/// Orthonormal basis of the numerical range of M (columns).
Matrix range_basis(const SymMatrix& m, std::optional<double> tol = std::nullopt);

double min_eigenvalue(const SymMatrix& m);
double max_eigenvalue(const SymMatrix& m);

/// Frobenius-nearest PSD matrix. With `centered`, the projection is onto
/// PSD matrices with Me = 0 (project onto e⊥ first, then clip).
SymMatrix nearest_psd(const SymMatrix& m, bool centered = false);

/// Keeps the k largest positive spectral components.
SymMatrix best_psd_rank_k(const SymMatrix& m, Index k);

/// Orthonormal basis for the orthogonal complement of range(v) in R^n.
/// `v` must have orthonormal columns.
Matrix orthogonal_complement(const Matrix& v);

/// Orthonormal basis of e⊥ in R^n (n×(n-1)).
Matrix centered_basis(Index n);

/// Projector onto e⊥: I - eeᵀ/n.
SymMatrix centering_projector(Index n);

/// Upper triangle, columnwise, off-diagonals scaled by √2, so that
/// svec(A)·svec(B) = ⟨A,B⟩.
Vector svec(const SymMatrix& m);
/// Inverse of svec. Throws DimensionMismatch when the length is not n(n+1)/2.
SymMatrix smat(const Vector& v);

/// Dense matrix fixture format: "n" then n rows.
SymMatrix read_dense(std::istream& in);
void write_dense(std::ostream& out, const SymMatrix& m);

}  // namespace facered
