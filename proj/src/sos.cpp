#include "facered/sos.hpp"

#include "facered/error.hpp"
#include "facered/lp.hpp"
#include "facered/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace facered {

namespace {

void check_exponent(const Exponent& e, int n) {
  if (static_cast<int>(e.size()) != n) throw Error(ErrorKind::DimensionMismatch, "exponent length differs from n");
  for (int k : e)
    if (k < 0) throw Error(ErrorKind::InvalidArgument, "negative exponent");
}

}  // namespace

Poly::Poly(int n, std::map<Exponent, double> terms) : n_(n) {
  for (const auto& [e, c] : terms) add_term(e, c);
}

int Poly::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, facered::degree(e));
  return d;
}

double Poly::coeff(const Exponent& e) const {
  const auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

void Poly::add_term(const Exponent& e, double c) {
  check_exponent(e, n_);
  const double v = coeff(e) + c;
  if (v == 0.0) {
    terms_.erase(e);
  } else {
    terms_[e] = v;
  }
}

Poly Poly::monomial(const Exponent& e, double c) {
  Poly p(static_cast<int>(e.size()));
  p.add_term(e, c);
  return p;
}

Poly operator+(const Poly& a, const Poly& b) {
  if (a.n() != b.n()) throw Error(ErrorKind::DimensionMismatch, "variable counts differ");
  Poly out = a;
  for (const auto& [e, c] : b.terms()) out.add_term(e, c);
  return out;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-1.0) * b; }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.n() != b.n()) throw Error(ErrorKind::DimensionMismatch, "variable counts differ");
  Poly out(a.n());
  for (const auto& [ea, ca] : a.terms())
    for (const auto& [eb, cb] : b.terms()) out.add_term(ea + eb, ca * cb);
  return out;
}

Poly operator*(double s, const Poly& a) {
  Poly out(a.n());
  for (const auto& [e, c] : a.terms()) out.add_term(e, s * c);
  return out;
}

int degree(const Exponent& e) {
  int d = 0;
  for (int k : e) d += k;
  return d;
}

Exponent operator+(const Exponent& a, const Exponent& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "exponent lengths differ");
  Exponent out(a.size());
  for (size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
  return out;
}

bool in_hull(const Exponent& p, const std::vector<Exponent>& points, double scale) {
  if (points.empty()) return false;
  const Index n = static_cast<Index>(p.size());
  const Index s = static_cast<Index>(points.size());
  LpProblem lp;
  lp.c = Vector::Zero(s);
  lp.a_eq = Matrix::Zero(n + 1, s);
  lp.b_eq = Vector::Zero(n + 1);
  for (Index j = 0; j < s; ++j) {
    for (Index k = 0; k < n; ++k) lp.a_eq(k, j) = points[static_cast<size_t>(j)][static_cast<size_t>(k)];
    lp.a_eq(n, j) = 1.0;
  }
  for (Index k = 0; k < n; ++k) lp.b_eq(k) = scale * p[static_cast<size_t>(k)];
  lp.b_eq(n) = 1.0;
  return solve_lp(lp).optimal();
}

namespace {

// Calls fn on every lattice point of the box [lo, hi].
template <class Fn>
void for_each_in_box(const Exponent& lo, const Exponent& hi, Fn fn) {
  for (size_t k = 0; k < lo.size(); ++k)
    if (lo[k] > hi[k]) return;
  Exponent e = lo;
  for (;;) {
    fn(e);
    size_t k = 0;
    while (k < e.size() && e[k] == hi[k]) {
      e[k] = lo[k];
      ++k;
    }
    if (k == e.size()) return;
    ++e[k];
  }
}

int floor_half(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }
int ceil_half(int v) { return -floor_half(-v); }

}  // namespace

MonomialSet initial_support(const std::vector<Poly>& polys) {
  std::set<Exponent> support;
  int n = -1;
  for (const Poly& p : polys) {
    if (n >= 0 && p.n() != n) throw Error(ErrorKind::DimensionMismatch, "variable counts differ");
    n = p.n();
    for (const auto& [e, c] : p.terms()) support.insert(e);
  }
  if (support.empty()) throw Error(ErrorKind::ZeroPolynomial, "initial support of the zero polynomial");
  const std::vector<Exponent> pts(support.begin(), support.end());
  Exponent lo(static_cast<size_t>(n)), hi(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    int mn = pts[0][static_cast<size_t>(k)], mx = mn;
    for (const Exponent& e : pts) {
      mn = std::min(mn, e[static_cast<size_t>(k)]);
      mx = std::max(mx, e[static_cast<size_t>(k)]);
    }
    lo[static_cast<size_t>(k)] = ceil_half(mn);
    hi[static_cast<size_t>(k)] = floor_half(mx);
  }
  MonomialSet out;
  for_each_in_box(lo, hi, [&](const Exponent& a) {
    if (in_hull(a, pts, 2.0)) out.insert(a);
  });
  return out;
}

MonomialSet initial_support(const Poly& f) { return initial_support(std::vector<Poly>{f}); }

MonomialSet m_plus(const MonomialSet& m) {
  MonomialSet out = m;
  for (auto b = m.begin(); b != m.end(); ++b) {
    for (auto g = std::next(b); g != m.end(); ++g) {
      const Exponent s = *b + *g;
      if (std::all_of(s.begin(), s.end(), [](int v) { return v % 2 == 0; })) {
        Exponent mid(s.size());
        for (size_t k = 0; k < s.size(); ++k) mid[k] = s[k] / 2;
        out.erase(mid);
      }
    }
  }
  return out;
}

MonomialSet m_sum(const MonomialSet& m) {
  MonomialSet out;
  for (const Exponent& a : m)
    for (const Exponent& b : m) out.insert(a + b);
  return out;
}

bool is_type1(const MonomialSet& m) {
  if (m.empty()) return true;
  const std::vector<Exponent> pts(m.begin(), m.end());
  const size_t n = pts[0].size();
  Exponent lo = pts[0], hi = pts[0];
  for (const Exponent& e : pts) {
    for (size_t k = 0; k < n; ++k) {
      lo[k] = std::min(lo[k], e[k]);
      hi[k] = std::max(hi[k], e[k]);
    }
  }
  bool ok = true;
  for_each_in_box(lo, hi, [&](const Exponent& a) {
    if (ok && !m.count(a) && in_hull(a, pts)) ok = false;
  });
  return ok;
}

std::optional<EliminationStep> elimination_step(const MonomialSet& m, const Poly& g0,
                                                const std::vector<Poly>& gs) {
  const MonomialSet plus = m_plus(m);
  if (plus.empty()) return std::nullopt;
  std::vector<const Poly*> data{&g0};
  for (const Poly& g : gs) data.push_back(&g);
  const MonomialSet sums = m_sum(m);
  std::set<Exponent> free_set;
  for (const Poly* g : data)
    for (const auto& [e, c] : g->terms())
      if (!sums.count(e)) free_set.insert(e);
  const std::vector<Exponent> free(free_set.begin(), free_set.end());
  const std::vector<Exponent> alphas(plus.begin(), plus.end());

  const Index nf = static_cast<Index>(free.size());
  const Index na = static_cast<Index>(alphas.size());
  const Index rows = static_cast<Index>(data.size()) + 1;
  LpProblem lp;
  lp.c = Vector::Zero(nf + na);
  lp.lower = Vector::Zero(nf + na);
  lp.lower.head(nf).setConstant(LpProblem::kFree);
  lp.a_eq = Matrix::Zero(rows, nf + na);
  lp.b_eq = Vector::Zero(rows);
  for (size_t i = 0; i < data.size(); ++i) {
    const Index r = static_cast<Index>(i);
    for (Index k = 0; k < nf; ++k) lp.a_eq(r, k) = data[i]->coeff(free[static_cast<size_t>(k)]);
    for (Index k = 0; k < na; ++k) {
      const Exponent& a = alphas[static_cast<size_t>(k)];
      lp.a_eq(r, nf + k) = data[i]->coeff(a + a);
    }
  }
  lp.a_eq.row(rows - 1).tail(na).setOnes();
  lp.b_eq(rows - 1) = 1.0;
  const LpResult res = solve_lp(lp);
  if (!res.optimal()) return std::nullopt;

  EliminationStep step;
  for (Index k = 0; k < nf; ++k)
    if (res.x(k) != 0.0) step.v[free[static_cast<size_t>(k)]] = res.x(k);
  for (Index k = 0; k < na; ++k) {
    const double lam = res.x(nf + k);
    const Exponent& a = alphas[static_cast<size_t>(k)];
    if (lam > 1e-9) step.removed.insert(a);
    if (lam != 0.0) step.v[a + a] += lam;
  }
  if (step.removed.empty()) return std::nullopt;
  return step;
}

EliminationResult eliminate(const Poly& g0, const std::vector<Poly>& gs, int max_iters) {
  std::vector<Poly> all{g0};
  all.insert(all.end(), gs.begin(), gs.end());
  EliminationResult out;
  out.initial = initial_support(all);
  out.final = out.initial;
  for (int it = 0; (max_iters < 0 || it < max_iters) && !out.final.empty(); ++it) {
    std::optional<EliminationStep> step = elimination_step(out.final, g0, gs);
    if (!step) break;
    for (const Exponent& a : step->removed) out.final.erase(a);
    out.steps.push_back(std::move(*step));
  }
  return out;
}

ConicProblem gram_system(const Poly& f, const MonomialSet& m) {
  const std::vector<Exponent> basis(m.begin(), m.end());
  const Index k = static_cast<Index>(basis.size());
  std::map<Exponent, SymMatrix> rows;
  for (const auto& [e, c] : f.terms()) rows.emplace(e, SymMatrix(k));
  for (Index a = 0; a < k; ++a) {
    for (Index b = a; b < k; ++b) {
      const Exponent s = basis[static_cast<size_t>(a)] + basis[static_cast<size_t>(b)];
      auto it = rows.try_emplace(s, SymMatrix(k)).first;
      it->second.add(a, b, 1.0);
    }
  }
  std::vector<SymMatrix> a;
  Vector rhs(static_cast<Index>(rows.size()));
  Index r = 0;
  for (auto& [e, mat] : rows) {
    rhs(r++) = f.coeff(e);
    a.push_back(std::move(mat));
  }
  return ConicProblem(std::move(a), rhs, SymMatrix(k));
}

bool verify_gram(const Poly& f, const MonomialSet& m, const SymMatrix& q, double tol) {
  if (q.n() != static_cast<Index>(m.size())) return false;
  const ConicProblem sys = gram_system(f, m);
  const double scale = std::max(1.0, sys.b().size() ? sys.b().cwiseAbs().maxCoeff() : 0.0);
  const Vector res = apply_A(sys, q) - sys.b();
  if (res.size() && res.cwiseAbs().maxCoeff() > tol * scale) return false;
  return min_eigenvalue(q) >= -tol * std::max(1.0, q.norm());
}

SosInput read_poly(std::istream& in) {
  LineReader rd(in);
  if (rd.expect_keyed("poly") != 1) rd.fail("unsupported poly version");
  std::vector<std::string> t;
  if (!rd.next(t) || t.size() != 2 || t[0] != "n") rd.fail("expected 'n <vars>'");
  const long long n = parse_int(t[1]);
  if (n < 1) rd.fail("need at least one variable");
  SosInput out;
  out.g0 = Poly(static_cast<int>(n));
  Poly* cur = &out.g0;
  while (rd.next(t)) {
    if (t[0] == "constraint") {
      if (t.size() != 1) rd.fail("'constraint' takes no arguments");
      out.gs.emplace_back(static_cast<int>(n));
      cur = &out.gs.back();
      continue;
    }
    if (static_cast<long long>(t.size()) != n + 1) rd.fail("expected 'coeff e1 ... en'");
    Exponent e(static_cast<size_t>(n));
    for (long long k = 0; k < n; ++k) {
      const long long v = parse_int(t[static_cast<size_t>(k + 1)]);
      if (v < 0) rd.fail("negative exponent");
      e[static_cast<size_t>(k)] = static_cast<int>(v);
    }
    cur->add_term(e, parse_double(t[0]));
  }
  return out;
}

namespace {

void write_terms(std::ostream& out, const Poly& p) {
  for (const auto& [e, c] : p.terms()) {
    out << format_double(c);
    for (int k : e) out << ' ' << k;
    out << '\n';
  }
}

}  // namespace

void write_poly(std::ostream& out, const SosInput& in) {
  out << "poly 1\nn " << in.g0.n() << '\n';
  write_terms(out, in.g0);
  for (const Poly& g : in.gs) {
    out << "constraint\n";
    write_terms(out, g);
  }
}

void write_monomials(std::ostream& out, const MonomialSet& m) {
  for (const Exponent& e : m) {
    for (size_t k = 0; k < e.size(); ++k) out << (k ? " " : "") << e[k];
    out << '\n';
  }
}

}  // namespace facered
