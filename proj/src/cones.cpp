#include "facered/cones.hpp"

#include "facered/error.hpp"

#include <cmath>

namespace facered {

namespace {

SymMatrix unit_trace(SymMatrix w) {
  const double t = w.trace();
  if (t > 0.0) w *= 1.0 / t;
  return w;
}

}  // namespace

FaceRep::FaceRep(Matrix basis, std::optional<SymMatrix> exposing)
    : basis_(std::move(basis)) {
  const Index k = basis_.cols();
  if (k > 0) {
    const double err = (basis_.transpose() * basis_ - Matrix::Identity(k, k)).norm();
    if (err > 1e-10 * std::max<double>(1.0, static_cast<double>(k))) {
      throw Error(ErrorKind::InvalidArgument, "face basis is not orthonormal");
    }
  }
  if (exposing) {
    if (exposing->n() != basis_.rows()) {
      throw Error(ErrorKind::DimensionMismatch, "exposing matrix order");
    }
    exposing_ = unit_trace(*exposing);
  }
}

FaceRep FaceRep::whole(Index n) { return FaceRep(Matrix::Identity(n, n), SymMatrix(n)); }

FaceRep FaceRep::trivial(Index n) {
  return FaceRep(Matrix(n, 0), SymMatrix::identity(n));
}

SymMatrix FaceRep::exposing() const {
  if (exposing_) return *exposing_;
  const Index n = ambient_n();
  return unit_trace(SymMatrix(Matrix(Matrix::Identity(n, n) - basis_ * basis_.transpose())));
}

SymMatrix FaceRep::projector() const {
  return SymMatrix(Matrix(basis_ * basis_.transpose()));
}

FaceRep face_from_exposing(const SymMatrix& w, std::optional<double> tol) {
  const Spectrum s = sym_eig(w);
  const double cut = rank_cutoff(s.values, tol);
  if (w.n() > 0 && s.values(w.n() - 1) < -cut) {
    throw Error(ErrorKind::NotPsd, "exposing matrix has eigenvalue " +
                                       std::to_string(s.values(w.n() - 1)));
  }
  return FaceRep(nullspace_basis(w, tol), w);
}

FaceRep minimal_face_of_point(const SymMatrix& x, std::optional<double> tol) {
  const Spectrum s = sym_eig(x);
  const double cut = rank_cutoff(s.values, tol);
  if (x.n() > 0 && s.values(x.n() - 1) < -cut) {
    throw Error(ErrorKind::NotPsd, "point is not PSD");
  }
  return FaceRep(range_basis(x, tol));
}

FaceRep intersect_faces(const FaceRep& a, const FaceRep& b, std::optional<double> tol) {
  if (a.ambient_n() != b.ambient_n()) {
    throw Error(ErrorKind::DimensionMismatch, "faces live in different cones");
  }
  return face_from_exposing(a.exposing() + b.exposing(), tol);
}

FaceRep conjugate_face(const FaceRep& f) {
  Matrix u = orthogonal_complement(f.basis());
  // f's range projector exposes the conjugate face.
  return FaceRep(std::move(u), f.projector());
}

bool face_contains(const FaceRep& f, const SymMatrix& x, double tol) {
  if (x.n() != f.ambient_n()) return false;
  const double scale = 1.0 + x.norm();
  if (min_eigenvalue(x) < -tol * scale) return false;
  const Matrix p = f.basis() * f.basis().transpose();
  return (x.mat() - p * x.mat() * p).norm() <= tol * scale;
}

double face_distance(const FaceRep& a, const FaceRep& b) {
  if (a.ambient_n() != b.ambient_n()) {
    throw Error(ErrorKind::DimensionMismatch, "faces live in different cones");
  }
  return (a.projector() - b.projector()).norm();
}

bool same_face(const FaceRep& a, const FaceRep& b, double tol) {
  return a.ambient_n() == b.ambient_n() && face_distance(a, b) <= tol;
}

bool OrthantFace::contains(const Vector& x, double tol) const {
  if (x.size() != n) return false;
  for (Index i = 0; i < n; ++i) {
    if (x(i) < -tol) return false;
    if (zero_set.count(i) && std::abs(x(i)) > tol) return false;
  }
  return true;
}

FaceRep OrthantFace::as_psd_face() const {
  Matrix v(n, n - static_cast<Index>(zero_set.size()));
  SymMatrix w(n);
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    if (zero_set.count(i)) {
      w.set(i, i, 1.0);
    } else {
      v.col(k++) = Vector::Unit(n, i);
    }
  }
  return FaceRep(v, w);
}

}  // namespace facered
