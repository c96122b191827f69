#include "facered/error.hpp"
#include "facered/lp.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>

using namespace facered;

namespace {

// Minimum of cᵀx over the polytope {x ≥ 0, A x ≤ b} by visiting every
// choice of n active constraints.
double brute_force_min(const Vector& c, const Matrix& a, const Vector& b) {
  const Index n = c.size();
  const Index m = a.rows();
  Matrix all(m + n, n);
  all << a, -Matrix::Identity(n, n);
  Vector rhs(m + n);
  rhs << b, Vector::Zero(n);
  double best = std::numeric_limits<double>::infinity();
  std::vector<bool> pick(static_cast<size_t>(m + n), false);
  std::fill(pick.begin(), pick.begin() + n, true);
  std::sort(pick.begin(), pick.end());
  do {
    Matrix sub(n, n);
    Vector sr(n);
    Index k = 0;
    for (Index i = 0; i < m + n; ++i)
      if (pick[static_cast<size_t>(i)]) {
        sub.row(k) = all.row(i);
        sr(k++) = rhs(i);
      }
    Eigen::FullPivLU<Matrix> lu(sub);
    if (lu.rank() < n) continue;
    const Vector x = lu.solve(sr);
    if (((all * x - rhs).array() <= 1e-9).all()) best = std::min(best, c.dot(x));
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace

TEST(LpTest, MaximizeZeroWithFixedVariable) {
  LpProblem p;
  p.c = Vector::Zero(1);
  p.maximize = true;
  p.a_eq = Matrix::Ones(1, 1);
  p.b_eq = Vector::Ones(1);
  const LpResult r = solve_lp(p);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.x(0), 1.0, 1e-12);
}

TEST(LpTest, UnboundedMaximization) {
  LpProblem p;
  p.c = Vector::Ones(1);
  p.maximize = true;
  EXPECT_EQ(solve_lp(p).status, LpStatus::Unbounded);
}

TEST(LpTest, SimplexOnSegment) {
  LpProblem p;
  p.c = Vector::Ones(2);
  p.a_eq = Matrix::Ones(1, 2);
  p.b_eq = Vector::Ones(1);
  const LpResult r = solve_lp(p);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(LpTest, Infeasible) {
  LpProblem p;
  p.c = Vector::Zero(2);
  p.a_eq = Matrix::Ones(1, 2);
  p.b_eq = -Vector::Ones(1);
  EXPECT_EQ(solve_lp(p).status, LpStatus::Infeasible);
}

TEST(LpTest, FreeVariablesAndShiftedBounds) {
  // min x0 - x1  s.t. x0 + x1 = 3, x1 ≤ 2, x0 free, x1 ≥ -1  → x = (1, 2)
  LpProblem p;
  p.c = (Vector(2) << 1, -1).finished();
  p.a_eq = (Matrix(1, 2) << 1, 1).finished();
  p.b_eq = (Vector(1) << 3).finished();
  p.a_le = (Matrix(1, 2) << 0, 1).finished();
  p.b_le = (Vector(1) << 2).finished();
  p.lower = (Vector(2) << LpProblem::kFree, -1).finished();
  const LpResult r = solve_lp(p);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.x(0), 1.0, 1e-12);
  EXPECT_NEAR(r.x(1), 2.0, 1e-12);
  EXPECT_NEAR(r.value, -1.0, 1e-12);
}

TEST(LpTest, RedundantEqualityRows) {
  LpProblem p;
  p.c = (Vector(3) << 1, 2, 3).finished();
  p.a_eq = (Matrix(2, 3) << 1, 1, 1, 2, 2, 2).finished();
  p.b_eq = (Vector(2) << 1, 2).finished();
  const LpResult r = solve_lp(p);
  ASSERT_TRUE(r.optimal());
  EXPECT_NEAR(r.value, 1.0, 1e-12);
  EXPECT_NEAR(p.b_eq.dot(r.dual_eq), r.value, 1e-10);
}

TEST(LpTest, DimensionMismatchThrows) {
  LpProblem p;
  p.c = Vector::Zero(2);
  p.a_eq = Matrix::Ones(1, 3);
  p.b_eq = Vector::Ones(1);
  EXPECT_THROW(solve_lp(p), Error);
}

TEST(LpTest, AgreesWithVertexEnumeration) {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 1 + trial % 6;
    const Index m = 1 + trial % 4;
    Matrix a(m + 1, n);
    Vector b(m + 1);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < n; ++j) a(i, j) = u(rng);
      b(i) = 0.5 + u(rng) * 0.5 + 0.01;
    }
    a.row(m).setOnes();
    b(m) = 5.0;
    Vector c(n);
    for (Index j = 0; j < n; ++j) c(j) = u(rng);
    LpProblem p;
    p.c = c;
    p.a_le = a;
    p.b_le = b;
    const LpResult r = solve_lp(p);
    ASSERT_TRUE(r.optimal());
    EXPECT_NEAR(r.value, brute_force_min(c, a, b), 1e-9);
    EXPECT_LE(((a * r.x - b).array()).maxCoeff(), 1e-8);
    EXPECT_GE(r.x.minCoeff(), -1e-8);
  }
}

TEST(LpTest, StrongDualityResidualRandom) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = 5 + trial % 26;
    const Index meq = 1 + trial % 10;
    const Index mle = 1 + (trial * 7) % 20;
    // Feasible by construction around x0, bounded by c > 0.
    Vector x0(n);
    for (Index j = 0; j < n; ++j) x0(j) = u(rng);
    LpProblem p;
    p.c = Vector(n);
    for (Index j = 0; j < n; ++j) p.c(j) = 0.1 + u(rng);
    p.a_eq = Matrix(meq, n);
    p.a_le = Matrix(mle, n);
    for (Index i = 0; i < meq; ++i)
      for (Index j = 0; j < n; ++j) p.a_eq(i, j) = u(rng) - 0.5;
    for (Index i = 0; i < mle; ++i)
      for (Index j = 0; j < n; ++j) p.a_le(i, j) = u(rng) - 0.5;
    p.b_eq = p.a_eq * x0;
    p.b_le = p.a_le * x0 + Vector::Constant(mle, 0.1);
    const LpResult r = solve_lp(p);
    ASSERT_TRUE(r.optimal());
    const double dual = p.b_eq.dot(r.dual_eq) + p.b_le.dot(r.dual_le);
    EXPECT_NEAR(r.value, dual, 1e-7);
    const Vector reduced = p.c - p.a_eq.transpose() * r.dual_eq - p.a_le.transpose() * r.dual_le;
    EXPECT_GE(reduced.minCoeff(), -1e-8);
    EXPECT_LE(r.dual_le.maxCoeff(), 1e-8);
    EXPECT_LE((p.a_eq * r.x - p.b_eq).cwiseAbs().maxCoeff(), 1e-8);
  }
}
