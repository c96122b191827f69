#include "facered/lp.hpp"

#include "facered/error.hpp"

#include <cmath>
#include <vector>

namespace facered {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;
constexpr long kMaxPivots = 200000;

// Standard form  A x = b, x ≥ 0, b ≥ 0, built from an LpProblem.
struct StandardForm {
  Matrix a;
  Vector b;
  Vector c;
  std::vector<double> row_sign;  // +1 or -1 applied to each original row
  // Original variable j is  offset(j) + x[plus(j)] - x[minus(j)]  (minus = -1 if none).
  std::vector<Index> plus;
  std::vector<Index> minus;
  Vector offset;
  Index num_eq = 0;
  Index num_le = 0;
  std::vector<Index> slack;  // standard column of each le row's slack
};

StandardForm to_standard(const LpProblem& p) {
  const Index n = p.num_vars();
  const Index meq = p.a_eq.rows();
  const Index mle = p.a_le.rows();
  if ((meq && p.a_eq.cols() != n) || (mle && p.a_le.cols() != n) ||
      p.b_eq.size() != meq || p.b_le.size() != mle ||
      (p.lower.size() != 0 && p.lower.size() != n)) {
    throw Error(ErrorKind::DimensionMismatch, "LP rows and columns disagree");
  }
  const Vector lower = p.lower.size() ? p.lower : Vector::Zero(n);

  StandardForm s;
  s.num_eq = meq;
  s.num_le = mle;
  s.offset = Vector::Zero(n);
  Index cols = 0;
  for (Index j = 0; j < n; ++j) {
    s.plus.push_back(cols++);
    if (std::isinf(lower(j))) {
      s.minus.push_back(cols++);
    } else {
      s.minus.push_back(-1);
      s.offset(j) = lower(j);
    }
  }
  for (Index i = 0; i < mle; ++i) s.slack.push_back(cols++);

  const Index m = meq + mle;
  s.a = Matrix::Zero(m, cols);
  s.b = Vector::Zero(m);
  s.c = Vector::Zero(cols);
  const double sense = p.maximize ? -1.0 : 1.0;
  for (Index j = 0; j < n; ++j) {
    s.c(s.plus[j]) = sense * p.c(j);
    if (s.minus[j] >= 0) s.c(s.minus[j]) = -sense * p.c(j);
  }
  auto fill_row = [&](Index row, const auto& coeffs, double rhs) {
    double b = rhs;
    for (Index j = 0; j < n; ++j) {
      const double v = coeffs(j);
      s.a(row, s.plus[j]) = v;
      if (s.minus[j] >= 0) s.a(row, s.minus[j]) = -v;
      b -= v * s.offset(j);
    }
    s.b(row) = b;
  };
  for (Index i = 0; i < meq; ++i) fill_row(i, p.a_eq.row(i), p.b_eq(i));
  for (Index i = 0; i < mle; ++i) {
    fill_row(meq + i, p.a_le.row(i), p.b_le(i));
    s.a(meq + i, s.slack[i]) = 1.0;
  }
  s.row_sign.assign(static_cast<size_t>(m), 1.0);
  for (Index i = 0; i < m; ++i) {
    if (s.b(i) < 0.0) {
      s.a.row(i) *= -1.0;
      s.b(i) = -s.b(i);
      s.row_sign[static_cast<size_t>(i)] = -1.0;
    }
  }
  return s;
}

class Tableau {
 public:
  // Columns [0, ncols) are structural; `basis` gives the basic column per row.
  Tableau(Matrix body, Vector rhs, std::vector<Index> basis)
      : t_(std::move(body)), rhs_(std::move(rhs)), basis_(std::move(basis)) {}

  Index rows() const { return t_.rows(); }
  Index cols() const { return t_.cols(); }
  const std::vector<Index>& basis() const { return basis_; }
  const Vector& rhs() const { return rhs_; }
  double at(Index i, Index j) const { return t_(i, j); }

  void pivot(Index r, Index col) {
    const double piv = t_(r, col);
    t_.row(r) /= piv;
    rhs_(r) /= piv;
    for (Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, col);
      if (f == 0.0) continue;
      t_.row(i) -= f * t_.row(r);
      rhs_(i) -= f * rhs_(r);
    }
    basis_[static_cast<size_t>(r)] = col;
    if (++pivots_ > kMaxPivots) {
      throw Error(ErrorKind::IterationLimit, "simplex pivot cap reached");
    }
  }

  void drop_row(Index r) {
    const Index m = t_.rows();
    for (Index i = r; i + 1 < m; ++i) {
      t_.row(i) = t_.row(i + 1);
      rhs_(i) = rhs_(i + 1);
    }
    t_.conservativeResize(m - 1, Eigen::NoChange);
    rhs_.conservativeResize(m - 1);
    basis_.erase(basis_.begin() + r);
  }

  void keep_columns(Index ncols) { t_.conservativeResize(Eigen::NoChange, ncols); }

  // Minimizes costᵀx over the current tableau with Bland's rule.
  // Returns false if unbounded.
  bool optimize(const Vector& cost, const std::vector<bool>& allowed) {
    for (;;) {
      // reduced costs d_j = c_j - c_Bᵀ T_j
      Index enter = -1;
      for (Index j = 0; j < t_.cols(); ++j) {
        if (!allowed[static_cast<size_t>(j)] || is_basic(j)) continue;
        double d = cost(j);
        for (Index i = 0; i < t_.rows(); ++i) d -= cost(basis_[static_cast<size_t>(i)]) * t_(i, j);
        if (d < -kCostTol * (1.0 + std::abs(cost(j)))) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Index leave = -1;
      double best = 0.0;
      for (Index i = 0; i < t_.rows(); ++i) {
        if (t_(i, enter) <= kPivotTol) continue;
        const double ratio = rhs_(i) / t_(i, enter);
        if (leave < 0 || ratio < best - 1e-12 ||
            (std::abs(ratio - best) <= 1e-12 &&
             basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(leave)])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

  bool is_basic(Index j) const {
    for (Index b : basis_)
      if (b == j) return true;
    return false;
  }

 private:
  Matrix t_;
  Vector rhs_;
  std::vector<Index> basis_;
  long pivots_ = 0;
};

}  // namespace

LpResult solve_lp(const LpProblem& p) {
  const StandardForm s = to_standard(p);
  const Index m = s.a.rows();
  const Index ns = s.a.cols();

  // Reuse a slack as the initial basic variable where its sign allows it.
  std::vector<Index> basis(static_cast<size_t>(m), -1);
  for (Index i = 0; i < s.num_le; ++i) {
    const Index row = s.num_eq + i;
    if (s.row_sign[static_cast<size_t>(row)] > 0) basis[static_cast<size_t>(row)] = s.slack[i];
  }
  Index nart = 0;
  for (Index b : basis)
    if (b < 0) ++nart;

  Matrix body = Matrix::Zero(m, ns + nart);
  body.leftCols(ns) = s.a;
  Index next = ns;
  for (Index i = 0; i < m; ++i) {
    if (basis[static_cast<size_t>(i)] < 0) {
      body(i, next) = 1.0;
      basis[static_cast<size_t>(i)] = next++;
    }
  }
  Tableau tab(std::move(body), s.b, basis);
  std::vector<Index> row_of(static_cast<size_t>(m));  // tableau row -> original row
  for (Index i = 0; i < m; ++i) row_of[static_cast<size_t>(i)] = i;

  LpResult result;
  if (nart > 0) {
    Vector phase1 = Vector::Zero(ns + nart);
    phase1.tail(nart).setOnes();
    std::vector<bool> all(static_cast<size_t>(ns + nart), true);
    tab.optimize(phase1, all);
    double infeas = 0.0;
    for (Index i = 0; i < tab.rows(); ++i)
      if (tab.basis()[static_cast<size_t>(i)] >= ns) infeas += tab.rhs()(i);
    if (infeas > 1e-8 * (1.0 + s.b.lpNorm<Eigen::Infinity>())) {
      result.status = LpStatus::Infeasible;
      return result;
    }
    // Drive remaining artificials out of the basis; drop redundant rows.
    for (Index i = tab.rows() - 1; i >= 0; --i) {
      if (tab.basis()[static_cast<size_t>(i)] < ns) continue;
      Index col = -1;
      for (Index j = 0; j < ns; ++j) {
        if (!tab.is_basic(j) && std::abs(tab.at(i, j)) > kPivotTol) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        tab.pivot(i, col);
      } else {
        tab.drop_row(i);
        row_of.erase(row_of.begin() + i);
      }
    }
    tab.keep_columns(ns);
  }

  std::vector<bool> allowed(static_cast<size_t>(ns), true);
  if (!tab.optimize(s.c, allowed)) {
    result.status = LpStatus::Unbounded;
    return result;
  }

  Vector xs = Vector::Zero(ns);
  for (Index i = 0; i < tab.rows(); ++i) xs(tab.basis()[static_cast<size_t>(i)]) = tab.rhs()(i);

  const Index n = p.num_vars();
  result.status = LpStatus::Optimal;
  result.x = Vector(n);
  for (Index j = 0; j < n; ++j) {
    double v = s.offset(j) + xs(s.plus[static_cast<size_t>(j)]);
    if (s.minus[static_cast<size_t>(j)] >= 0) v -= xs(s.minus[static_cast<size_t>(j)]);
    result.x(j) = v;
  }
  result.value = p.c.dot(result.x);

  // Duals from the optimal basis: B_sᵀ y = c_B on the surviving rows.
  const Index mr = tab.rows();
  Vector ys = Vector::Zero(m);
  if (mr > 0) {
    Matrix bmat(mr, mr);
    Vector cb(mr);
    for (Index k = 0; k < mr; ++k) {
      const Index col = tab.basis()[static_cast<size_t>(k)];
      cb(k) = s.c(col);
      for (Index i = 0; i < mr; ++i) bmat(i, k) = s.a(row_of[static_cast<size_t>(i)], col);
    }
    const Vector y = bmat.transpose().fullPivLu().solve(cb);
    for (Index i = 0; i < mr; ++i) ys(row_of[static_cast<size_t>(i)]) = y(i);
  }
  const double sense = p.maximize ? -1.0 : 1.0;
  result.dual_eq = Vector(s.num_eq);
  result.dual_le = Vector(s.num_le);
  for (Index i = 0; i < m; ++i) {
    const double y = sense * ys(i) * s.row_sign[static_cast<size_t>(i)];
    if (i < s.num_eq) {
      result.dual_eq(i) = y;
    } else {
      result.dual_le(i - s.num_eq) = y;
    }
  }
  return result;
}

}  // namespace facered
