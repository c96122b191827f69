#include "facered/lifts.hpp"

#include "facered/cones.hpp"
#include "facered/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace facered;

namespace {

Matrix random_symmetric(Index n, std::mt19937& rng) {
  std::uniform_int_distribution<int> g(-5, 5);
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
  return a;
}

Matrix random_general(Index n, std::mt19937& rng) {
  std::uniform_int_distribution<int> g(-5, 5);
  Matrix a(n, n);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  return a;
}

std::vector<Vector> all_cuts(Index n) {
  std::vector<Vector> out;
  for (Index mask = 0; mask < (Index{1} << n); ++mask) {
    Vector x(n);
    for (Index i = 0; i < n; ++i) x(i) = (mask >> i) & 1 ? 1.0 : -1.0;
    out.push_back(x);
  }
  return out;
}

// Direct sum over the defining double loop, independent of the Kronecker layout.
double qap_direct(const Matrix& f, const Matrix& d, const Matrix& c, const Matrix& x) {
  const Index n = f.rows();
  std::vector<Index> p(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (x(i, j) == 1.0) p[static_cast<size_t>(i)] = j;
  double s = 0.0;
  for (Index i = 0; i < n; ++i) {
    s += c(i, p[static_cast<size_t>(i)]);
    for (Index k = 0; k < n; ++k) s += f(i, k) * d(p[static_cast<size_t>(i)], p[static_cast<size_t>(k)]);
  }
  return s;
}

}  // namespace

TEST(Svec, Examples) {
  const Vector v = svec(SymMatrix((Matrix(2, 2) << 1, 2, 2, 3).finished()));
  EXPECT_NEAR(v(0), 1.0, 1e-15);
  EXPECT_NEAR(v(1), 2.0 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(v(2), 3.0, 1e-15);
  EXPECT_EQ(svec(SymMatrix::identity(2)), (Vector(3) << 1, 0, 1).finished());
  std::mt19937 rng(1);
  for (int t = 0; t < 10; ++t) {
    const SymMatrix a(random_symmetric(5, rng));
    const SymMatrix b(random_symmetric(5, rng));
    EXPECT_NEAR(svec(a).dot(svec(b)), inner(a, b), 1e-12);
    EXPECT_EQ(smat(svec(a)), a);
  }
  EXPECT_THROW(smat(Vector::Zero(4)), Error);
}

TEST(AffineHull, StrictlyFeasibleLiftExample) {
  const Matrix l = (Matrix(1, 3) << 1, 0, 1).finished();
  const SymMatrix w = affine_hull_exposing(l, Vector::Zero(1));
  std::vector<Vector> pts{(Vector(3) << 1, 1, -1).finished(), (Vector(3) << 1, -1, -1).finished()};
  pts.push_back(-pts[0]);
  pts.push_back(-pts[1]);
  for (const Vector& p : pts) EXPECT_NEAR(inner(w, rank_one_lift(p)), 0.0, 1e-14);
  // The identity is feasible for the lift without this constraint but is not
  // in the exposed face.
  EXPECT_GT(inner(w, SymMatrix::identity(4)), 0.5);
  EXPECT_GE(min_eigenvalue(w), -1e-14);
  // Barycenter of the four lifts has rank d + 1 = 3, the face dimension.
  SymMatrix bary(4);
  for (const Vector& p : pts) bary += 0.25 * rank_one_lift(p);
  EXPECT_EQ(range_basis(bary).cols(), 3);
  EXPECT_EQ(nullspace_basis(w).cols(), 3);
}

TEST(AffineHull, EmptyAndPinned) {
  EXPECT_EQ(affine_hull_exposing(Matrix(0, 3), Vector(0)).norm(), 0.0);
  const SymMatrix w = affine_hull_exposing(Matrix::Identity(3, 3), (Vector(3) << 1, 2, 3).finished());
  EXPECT_EQ(range_basis(w).cols(), 3);
}

TEST(AffineHull, PermutationHullMatchesD0) {
  for (Index n = 2; n <= 5; ++n) {
    Matrix l = Matrix::Zero(2 * n, n * n);
    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < n; ++k) {
        l(i, k * n + i) = 1.0;      // row sums
        l(n + i, i * n + k) = 1.0;  // column sums
      }
    }
    const FaceRep from_hull(nullspace_basis(affine_hull_exposing(l, Vector::Ones(2 * n))));
    const FaceRep from_d0(qap_face_basis(n));
    EXPECT_LT((from_hull.projector().mat() - from_d0.projector().mat()).norm(), 1e-8) << n;
  }
}

TEST(MaxCut, SizesAndAnnihilation) {
  for (Index n = 2; n <= 5; ++n) {
    const Matrix w = Matrix::Ones(n, n) - Matrix::Identity(n, n);
    const LiftedProblem lp = maxcut_second_lift(w);
    EXPECT_EQ(lp.order, n * (n + 1) / 2 + 1);
    EXPECT_EQ(maxcut_e(n).rows(), lp.order);
    EXPECT_EQ(maxcut_e(n).cols(), n);
    EXPECT_EQ(lp.basis.cols(), lp.order - n);
    for (const Vector& x : all_cuts(n)) {
      const SymMatrix y = lift_cut(x);
      EXPECT_NEAR(inner(lp.exposing, y), 0.0, 1e-10);
      for (const IndexConstraint& c : lp.constraints) EXPECT_NEAR(c.evaluate(y), 0.0, 1e-12);
      EXPECT_TRUE(face_contains(FaceRep(lp.basis), y, 1e-10));
    }
  }
}

TEST(MaxCut, ObjectiveIsCutWeight) {
  std::mt19937 rng(2);
  for (Index n = 2; n <= 5; ++n) {
    Matrix w = random_symmetric(n, rng).cwiseAbs();
    w.diagonal().setZero();
    const LiftedProblem lp = maxcut_second_lift(w);
    for (const Vector& x : all_cuts(n)) {
      EXPECT_NEAR(inner(lp.objective, lift_cut(x)), cut_value(w, x), 1e-10);
    }
  }
  const Matrix edge = (Matrix(2, 2) << 0, 1, 1, 0).finished();
  const LiftedProblem lp = maxcut_second_lift(edge);
  EXPECT_NEAR(inner(lp.objective, lift_cut((Vector(2) << 1, -1).finished())), 1.0, 1e-12);
  EXPECT_NEAR(inner(lp.objective, lift_cut((Vector(2) << 1, 1).finished())), 0.0, 1e-12);
}

TEST(MaxCut, ReducedProblemAcceptsCuts) {
  const Matrix w = Matrix::Ones(4, 4) - Matrix::Identity(4, 4);
  const LiftedProblem lp = maxcut_second_lift(w);
  for (const Vector& x : all_cuts(4)) {
    const SymMatrix r = reduce_lift(lift_cut(x), lp.basis);
    EXPECT_LT((apply_A(lp.reduced, r) - lp.reduced.b()).norm(), 1e-10);
  }
}

TEST(Qap, ObjectiveMatchesTraceFormula) {
  std::mt19937 rng(3);
  for (Index n = 2; n <= 4; ++n) {
    const Matrix f = random_symmetric(n, rng);
    const Matrix d = random_symmetric(n, rng);
    const Matrix c = random_general(n, rng);
    const SymMatrix l = qap_objective(f, d, c);
    for (const Matrix& x : all_permutations(n)) {
      EXPECT_NEAR(inner(l, lift_permutation(x)), qap_direct(f, d, c, x), 1e-9);
      EXPECT_NEAR(qap_value(f, d, c, x), qap_direct(f, d, c, x), 1e-9);
    }
  }
  EXPECT_EQ(qap_objective(Matrix::Zero(3, 3), Matrix::Ones(3, 3), Matrix::Zero(3, 3)).norm(), 0.0);
  EXPECT_THROW(qap_objective(Matrix::Zero(3, 2), Matrix::Zero(3, 3), Matrix::Zero(3, 3)), Error);
}

TEST(Qap, TwoByTwoByHand) {
  const Matrix f = (Matrix(2, 2) << 0, 3, 3, 0).finished();
  const Matrix d = (Matrix(2, 2) << 0, 2, 2, 0).finished();
  const Matrix c = (Matrix(2, 2) << 1, 5, 7, 4).finished();
  // Identity: flow 3 between facilities over distance 2, twice, plus C11 + C22.
  EXPECT_NEAR(inner(qap_objective(f, d, c), lift_permutation(Matrix::Identity(2, 2))), 12.0 + 5.0, 1e-12);
}

TEST(Qap, AssignmentExposing) {
  for (Index n = 2; n <= 5; ++n) {
    const AssignmentExposing ex = qap_assignment_exposing(n);
    EXPECT_EQ(range_basis(ex.d0).cols(), 2 * n - 1);
    EXPECT_GE(min_eigenvalue(ex.d0), -1e-10);
    const Matrix v = qap_face_basis(n);
    EXPECT_EQ(v.cols(), (n - 1) * (n - 1) + 1);
    EXPECT_LT((ex.d0.mat() * v).norm(), 1e-10);
    EXPECT_LT((v.transpose() * v - Matrix::Identity(v.cols(), v.cols())).norm(), 1e-10);
    if (n <= 4) {
      for (const Matrix& x : all_permutations(n)) EXPECT_NEAR(inner(ex.d0, lift_permutation(x)), 0.0, 1e-12);
    }
  }
}

TEST(Qap, GangsterCardinalityAndIndependence) {
  const std::vector<size_t> expected{10, 33, 76};
  for (Index n = 3; n <= 5; ++n) {
    const auto j = gangster_index_set(n);
    EXPECT_EQ(j.size(), expected[static_cast<size_t>(n - 3)]);
    EXPECT_EQ(static_cast<Index>(j.size()), n * n * n - 2 * n * n + 1);
    const Matrix v = qap_face_basis(n);
    Matrix rows(static_cast<Index>(j.size()), v.cols() * (v.cols() + 1) / 2);
    for (size_t k = 0; k < j.size(); ++k)
      rows.row(static_cast<Index>(k)) = svec(SymMatrix::unit(v.rows(), j[k].first, j[k].second).congruence(v));
    EXPECT_EQ(Eigen::FullPivLU<Matrix>(rows).rank(), static_cast<Index>(j.size()));
    EXPECT_EQ(j.front(), (std::pair<Index, Index>{0, 0}));
  }
  EXPECT_EQ(qap_unreduced_constraint_count(3), 35);
}

TEST(Qap, ReducedLiftsFeasibleWithMatchingObjective) {
  std::mt19937 rng(4);
  for (Index n = 3; n <= 5; ++n) {
    const Matrix f = random_symmetric(n, rng);
    const Matrix d = random_symmetric(n, rng);
    const Matrix c = random_general(n, rng);
    const LiftedProblem red = qap_reduced(f, d, c);
    EXPECT_EQ(red.reduced.n(), (n - 1) * (n - 1) + 1);
    EXPECT_EQ(red.reduced.m(), n * n * n - 2 * n * n + 1);
    SymMatrix bary(red.reduced.n());
    const auto perms = all_permutations(n);
    for (const Matrix& x : perms) {
      const SymMatrix y = lift_permutation(x);
      const SymMatrix r = reduce_lift(y, red.basis);
      EXPECT_LT((r.congruence(red.basis.transpose()).mat() - y.mat()).norm(), 1e-10);
      EXPECT_LT((apply_A(red.reduced, r) - red.reduced.b()).cwiseAbs().maxCoeff(), 1e-8);
      EXPECT_NEAR(inner(red.reduced.c(), r), qap_direct(f, d, c, x), 1e-8);
      bary += (1.0 / static_cast<double>(perms.size())) * r;
    }
    EXPECT_GT(min_eigenvalue(bary), 1e-6) << "n " << n;
  }
}

TEST(Qap, LiftPermutation) {
  const SymMatrix y = lift_permutation(Matrix::Identity(2, 2));
  EXPECT_EQ(y(0, 0), 1.0);
  EXPECT_EQ(range_basis(y).cols(), 1);
  const Matrix bad = (Matrix(2, 2) << 1, 1, 0, 0).finished();
  try {
    lift_permutation(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPermutation);
  }
  EXPECT_THROW(lift_permutation((Matrix(2, 2) << 0.5, 0.5, 0.5, 0.5).finished()), Error);
  EXPECT_EQ(all_permutations(4).size(), 24u);
}
