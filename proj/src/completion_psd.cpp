#include "facered/completion_psd.hpp"

#include "facered/error.hpp"
#include "facered/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>

namespace facered {

ObservationGraph::ObservationGraph(Index n, std::vector<Edge> edges, bool require_loops)
    : n_(n), adj_(static_cast<size_t>(std::max<Index>(n, 0))) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative node count");
  for (Edge& e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first < 0 || e.second >= n) {
      throw Error(ErrorKind::InvalidArgument, "edge index out of range");
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
  std::vector<bool> loop(static_cast<size_t>(n), false);
  for (const Edge& e : edges_) {
    if (e.first == e.second) {
      loop[static_cast<size_t>(e.first)] = true;
    } else {
      adj_[static_cast<size_t>(e.first)].push_back(e.second);
      adj_[static_cast<size_t>(e.second)].push_back(e.first);
    }
  }
  for (auto& a : adj_) std::sort(a.begin(), a.end());
  if (require_loops) {
    for (Index i = 0; i < n; ++i) {
      if (!loop[static_cast<size_t>(i)]) {
        throw Error(ErrorKind::InvalidArgument,
                    "missing self-loop at node " + std::to_string(i + 1));
      }
    }
  }
}

ObservationGraph ObservationGraph::with_loops(Index n, std::vector<Edge> edges) {
  for (Index i = 0; i < n; ++i) edges.emplace_back(i, i);
  return ObservationGraph(n, std::move(edges), true);
}

Index ObservationGraph::edge_index(Index i, Index j) const {
  if (i > j) std::swap(i, j);
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{i, j});
  if (it == edges_.end() || *it != Edge{i, j}) return -1;
  return static_cast<Index>(it - edges_.begin());
}

PartialMatrix::PartialMatrix(ObservationGraph g, Vector v)
    : graph(std::move(g)), values(std::move(v)) {
  if (values.size() != graph.num_edges()) {
    throw Error(ErrorKind::DimensionMismatch, "need one value per edge");
  }
}

std::optional<double> PartialMatrix::value(Index i, Index j) const {
  const Index k = graph.edge_index(i, j);
  if (k < 0) return std::nullopt;
  return values(k);
}

SymMatrix PartialMatrix::principal(const std::vector<Index>& alpha) const {
  const Index k = static_cast<Index>(alpha.size());
  SymMatrix out(k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = a; b < k; ++b) {
      const auto v = value(alpha[static_cast<size_t>(a)], alpha[static_cast<size_t>(b)]);
      if (!v) throw Error(ErrorKind::InvalidArgument, "clique has an unobserved pair");
      out.set(a, b, *v);
    }
  }
  return out;
}

Vector project_E(const SymMatrix& x, const ObservationGraph& g) {
  if (x.n() != g.n()) throw Error(ErrorKind::DimensionMismatch, "project_E: order mismatch");
  Vector out(g.num_edges());
  for (Index k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[static_cast<size_t>(k)];
    out(k) = x(e.first, e.second);
  }
  return out;
}

SymMatrix pad_E_star(const Vector& v, const ObservationGraph& g) {
  if (v.size() != g.num_edges()) throw Error(ErrorKind::DimensionMismatch, "pad: length mismatch");
  SymMatrix out(g.n());
  for (Index k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[static_cast<size_t>(k)];
    out.set(e.first, e.second, v(k));
  }
  return out;
}

double edge_inner(const ObservationGraph& g, const Vector& u, const Vector& v) {
  double s = 0.0;
  for (Index k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[static_cast<size_t>(k)];
    s += (e.first == e.second ? 1.0 : 2.0) * u(k) * v(k);
  }
  return s;
}

namespace {

// Chordless cycle through some v: two nonadjacent neighbors a, b of v joined
// by a shortest path that avoids the rest of v's closed neighborhood.
std::vector<Index> find_chordless_cycle(const ObservationGraph& g) {
  const Index n = g.n();
  for (Index v = 0; v < n; ++v) {
    const auto& nv = g.neighbors(v);
    for (size_t ia = 0; ia < nv.size(); ++ia) {
      for (size_t ib = ia + 1; ib < nv.size(); ++ib) {
        const Index a = nv[ia];
        const Index b = nv[ib];
        if (g.adjacent(a, b)) continue;
        std::vector<bool> blocked(static_cast<size_t>(n), false);
        blocked[static_cast<size_t>(v)] = true;
        for (Index w : nv)
          if (w != a && w != b) blocked[static_cast<size_t>(w)] = true;
        std::vector<Index> parent(static_cast<size_t>(n), -1);
        std::deque<Index> queue{a};
        parent[static_cast<size_t>(a)] = a;
        while (!queue.empty() && parent[static_cast<size_t>(b)] < 0) {
          const Index u = queue.front();
          queue.pop_front();
          for (Index w : g.neighbors(u)) {
            if (blocked[static_cast<size_t>(w)] || parent[static_cast<size_t>(w)] >= 0) continue;
            parent[static_cast<size_t>(w)] = u;
            queue.push_back(w);
          }
        }
        if (parent[static_cast<size_t>(b)] < 0) continue;
        std::vector<Index> cycle{v};
        std::vector<Index> path;
        for (Index u = b; u != a; u = parent[static_cast<size_t>(u)]) path.push_back(u);
        path.push_back(a);
        cycle.insert(cycle.end(), path.rbegin(), path.rend());
        return cycle;
      }
    }
  }
  return {};
}

}  // namespace

ChordalityResult is_chordal(const ObservationGraph& g) {
  const Index n = g.n();
  // Maximum cardinality search; ties go to the smallest index.
  std::vector<Index> weight(static_cast<size_t>(n), 0);
  std::vector<bool> done(static_cast<size_t>(n), false);
  std::vector<Index> visit;
  for (Index step = 0; step < n; ++step) {
    Index best = -1;
    for (Index v = 0; v < n; ++v)
      if (!done[static_cast<size_t>(v)] &&
          (best < 0 || weight[static_cast<size_t>(v)] > weight[static_cast<size_t>(best)]))
        best = v;
    done[static_cast<size_t>(best)] = true;
    visit.push_back(best);
    for (Index w : g.neighbors(best))
      if (!done[static_cast<size_t>(w)]) ++weight[static_cast<size_t>(w)];
  }
  std::vector<Index> order(visit.rbegin(), visit.rend());
  std::vector<Index> pos(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) pos[static_cast<size_t>(order[static_cast<size_t>(i)])] = i;

  ChordalityResult res;
  bool ok = true;
  for (Index v : order) {
    std::vector<Index> later;
    for (Index w : g.neighbors(v))
      if (pos[static_cast<size_t>(w)] > pos[static_cast<size_t>(v)]) later.push_back(w);
    for (size_t a = 0; a < later.size() && ok; ++a)
      for (size_t b = a + 1; b < later.size() && ok; ++b)
        if (!g.adjacent(later[a], later[b])) ok = false;
    if (!ok) break;
  }
  res.chordal = ok;
  if (ok) {
    res.elimination_order = std::move(order);
  } else {
    res.chordless_cycle = find_chordless_cycle(g);
  }
  return res;
}

namespace {

void bron_kerbosch(const ObservationGraph& g, std::vector<Index>& r, std::vector<Index> p,
                   std::vector<Index> x, std::vector<std::vector<Index>>& out) {
  if (p.empty() && x.empty()) {
    std::vector<Index> c = r;
    std::sort(c.begin(), c.end());
    out.push_back(std::move(c));
    return;
  }
  // Pivot with the most neighbors in P.
  Index pivot = -1;
  size_t best = 0;
  for (const auto* set : {&p, &x}) {
    for (Index u : *set) {
      size_t cnt = 0;
      for (Index w : p)
        if (g.adjacent(u, w)) ++cnt;
      if (pivot < 0 || cnt > best) {
        pivot = u;
        best = cnt;
      }
    }
  }
  std::vector<Index> candidates;
  for (Index v : p)
    if (!g.adjacent(pivot, v)) candidates.push_back(v);
  for (Index v : candidates) {
    std::vector<Index> np, nx;
    for (Index w : p)
      if (g.adjacent(v, w)) np.push_back(w);
    for (Index w : x)
      if (g.adjacent(v, w)) nx.push_back(w);
    r.push_back(v);
    bron_kerbosch(g, r, std::move(np), std::move(nx), out);
    r.pop_back();
    p.erase(std::find(p.begin(), p.end(), v));
    x.push_back(v);
  }
}

}  // namespace

std::vector<std::vector<Index>> maximal_cliques(const ObservationGraph& g) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> r;
  std::vector<Index> p(static_cast<size_t>(g.n()));
  for (Index i = 0; i < g.n(); ++i) p[static_cast<size_t>(i)] = i;
  bron_kerbosch(g, r, std::move(p), {}, out);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

SymMatrix pad_block(const SymMatrix& block, const std::vector<Index>& alpha, Index n) {
  SymMatrix out(n);
  const Index k = static_cast<Index>(alpha.size());
  for (Index a = 0; a < k; ++a)
    for (Index b = a; b < k; ++b)
      out.set(alpha[static_cast<size_t>(a)], alpha[static_cast<size_t>(b)], block(a, b));
  return out;
}

}  // namespace

SymMatrix clique_exposing(const PartialMatrix& p, const std::vector<Index>& alpha, double tol) {
  const SymMatrix block = p.principal(alpha);
  const Spectrum s = sym_eig(block);
  const double top = s.values.size() ? s.values.cwiseAbs().maxCoeff() : 0.0;
  const double cut = tol * top;
  if (s.values.size() && s.values(s.values.size() - 1) < -std::max(cut, tol)) {
    throw Error(ErrorKind::PartialNotPsd, "specified principal submatrix is not PSD");
  }
  Matrix proj = Matrix::Zero(block.n(), block.n());
  for (Index i = 0; i < s.values.size(); ++i) {
    if (s.values(i) <= cut) proj += s.vectors.col(i) * s.vectors.col(i).transpose();
  }
  const double scale = s.values.size() && s.values(0) > 0.0 ? s.values(0) : 1.0;
  return pad_block(SymMatrix(Matrix(scale * proj)), alpha, p.graph.n());
}

SymMatrix clique_exposing_sum(const PartialMatrix& p,
                              const std::vector<std::vector<Index>>& cliques, double tol) {
  SymMatrix sum(p.graph.n());
  for (const auto& alpha : cliques) sum += clique_exposing(p, alpha, tol);
  return sum;
}

FaceRep combined_face(const PartialMatrix& p, const std::vector<std::vector<Index>>& cliques,
                      double tol) {
  std::vector<std::vector<Index>> sorted = cliques;
  std::sort(sorted.begin(), sorted.end());
  SymMatrix sum(p.graph.n());
  for (const auto& alpha : sorted) {
    const SymMatrix w = clique_exposing(p, alpha, tol);
    const double t = w.trace();
    if (t > 0.0) sum += (1.0 / t) * w;
  }
  return FaceRep(nullspace_basis(sum, tol), sum);
}

ConicProblem completion_problem(const PartialMatrix& p, const FaceRep& face) {
  const Matrix& v = face.basis();
  std::vector<SymMatrix> a;
  for (const Edge& e : p.graph.edges()) {
    a.push_back(SymMatrix::unit(p.graph.n(), e.first, e.second).congruence(v));
  }
  return ConicProblem(std::move(a), p.values, SymMatrix(v.cols()));
}

std::optional<SymMatrix> complete(const PartialMatrix& p, const FaceRep& face, Index iters,
                                  double tol) {
  if (face.ambient_n() != p.graph.n()) {
    throw Error(ErrorKind::DimensionMismatch, "face order differs from the graph");
  }
  const Matrix& v = face.basis();
  const Index k = v.cols();
  const double target = tol * (1.0 + p.values.norm());
  auto residual = [&](const SymMatrix& x) { return (project_E(x, p.graph) - p.values).norm(); };
  if (k == 0) {
    const SymMatrix zero(p.graph.n());
    if (residual(zero) <= target) return zero;
    return std::nullopt;
  }
  const ConicProblem reduced = completion_problem(p, face);
  Matrix rows(reduced.m(), k * (k + 1) / 2);
  for (Index i = 0; i < reduced.m(); ++i) rows.row(i) = svec(reduced.a(i)).transpose();
  const Vector z = rows.completeOrthogonalDecomposition().solve(p.values);
  const SymMatrix r = smat(z);
  if ((rows * z - p.values).norm() > target) return std::nullopt;
  if (min_eigenvalue(r) >= -tol * std::max(1.0, r.norm())) {
    const SymMatrix x(Matrix(v * nearest_psd(r).mat() * v.transpose()));
    if (residual(x) <= target) return x;
  }
  std::vector<SymMatrix> a;
  for (const Edge& e : p.graph.edges()) a.push_back(SymMatrix::unit(p.graph.n(), e.first, e.second));
  return alternating_projection_solve(face, a, p.values, iters, tol);
}

CompletionReduction reduce_completion(const PartialMatrix& p, double tol) {
  CompletionReduction out;
  out.chordality = is_chordal(p.graph);
  out.cliques = maximal_cliques(p.graph);
  out.face = combined_face(p, out.cliques, tol);
  if (!out.chordality.chordal) {
    out.warnings.push_back(
        "graph is not chordal; clique faces may be larger than the minimal face");
  }
  return out;
}

namespace {

constexpr double kGolden = 0.6180339887498949;

// Maximizes a concave function on [lo, hi] by golden-section search.
template <class F>
std::pair<double, double> golden_max(F f, double lo, double hi, int iters) {
  double a = lo, b = hi;
  double c = b - kGolden * (b - a), d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < iters; ++it) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    }
  }
  return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

std::pair<double, SymMatrix> best_min_eigenvalue(const PartialMatrix& p) {
  const Index n = p.graph.n();
  SymMatrix base(n);
  double bound = 0.0;
  std::vector<Edge> unknown;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      const auto v = p.value(i, j);
      if (v) {
        base.set(i, j, *v);
        if (i == j) bound = std::max(bound, std::abs(*v));
      } else if (i == j) {
        throw Error(ErrorKind::InvalidArgument, "diagonal entries must be observed");
      } else {
        unknown.emplace_back(i, j);
      }
    }
  }
  if (unknown.size() > 3) {
    throw Error(ErrorKind::InvalidArgument, "at most three unobserved pairs are supported");
  }
  // PSD forces |X_ij| ≤ max diagonal entry.
  std::vector<double> fill(unknown.size(), 0.0);
  auto eval = [&]() {
    SymMatrix x = base;
    for (size_t k = 0; k < unknown.size(); ++k) x.set(unknown[k].first, unknown[k].second, fill[k]);
    return min_eigenvalue(x);
  };
  // Nested golden sections; λ_min is concave in the fill, so each level is
  // a concave maximization. After each search the deeper levels are re-run
  // at the winning value so that `fill` holds a consistent argmax.
  std::function<double(size_t)> level = [&](size_t depth) -> double {
    if (depth == unknown.size()) return eval();
    const auto best = golden_max(
        [&](double t) {
          fill[depth] = t;
          return level(depth + 1);
        },
        -bound, bound, 60);
    fill[depth] = best.first;
    if (depth + 1 < unknown.size()) level(depth + 1);
    return best.second;
  };
  const double best = level(0);
  SymMatrix x = base;
  for (size_t k = 0; k < unknown.size(); ++k) x.set(unknown[k].first, unknown[k].second, fill[k]);
  return {std::max(best, min_eigenvalue(x)), x};
}

double boundary_epsilon(const std::function<PartialMatrix(double)>& family, double lo, double hi,
                        double tol) {
  auto feasible = [&](double eps) { return best_min_eigenvalue(family(eps)).first >= 0.0; };
  if (!(lo < hi) || feasible(lo) || !feasible(hi)) {
    throw Error(ErrorKind::BadBracket, "need infeasible lo and feasible hi");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

PartialMatrix cycle_family(double eps) {
  const ObservationGraph g = ObservationGraph::with_loops(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  Vector v(g.num_edges());
  for (Index k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[static_cast<size_t>(k)];
    if (e.first == e.second) {
      v(k) = 1.0 + eps;
    } else if (e == Edge{0, 3}) {
      v(k) = -1.0;
    } else {
      v(k) = 1.0;
    }
  }
  return PartialMatrix(g, v);
}

PartialMatrix banded_ones(Index n) {
  std::vector<Edge> edges;
  for (Index i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  const ObservationGraph g = ObservationGraph::with_loops(n, edges);
  return PartialMatrix(g, Vector::Ones(g.num_edges()));
}

PartialMatrix path_example() {
  const ObservationGraph g = ObservationGraph::with_loops(4, {{0, 1}, {1, 2}, {2, 3}});
  SymMatrix full{{1, 1, 0, 0}, {1, 1, 1, 0}, {0, 1, 1, -1}, {0, 0, -1, 2}};
  return PartialMatrix(g, project_E(full, g));
}

PartialMatrix read_partial(std::istream& in) {
  LineReader rd(in);
  if (rd.expect_keyed("psdc") != 1) rd.fail("unsupported psdc version");
  const long long n = rd.expect_keyed("n");
  if (n < 1) rd.fail("n must be positive");
  std::vector<Edge> edges;
  std::vector<double> vals;
  std::vector<std::string> t;
  while (rd.next(t)) {
    if (t.size() != 3) rd.fail("expected 'i j value'");
    const long long i = parse_int(t[0]);
    const long long j = parse_int(t[1]);
    if (i < 1 || j < 1 || i > n || j > n) rd.fail("index out of range");
    if (i > j) rd.fail("entries must satisfy i <= j");
    edges.emplace_back(i - 1, j - 1);
    vals.push_back(parse_double(t[2]));
  }
  std::vector<Edge> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::Parse, "duplicate entry");
  }
  ObservationGraph g(static_cast<Index>(n), edges, true);
  Vector v(g.num_edges());
  for (size_t k = 0; k < edges.size(); ++k) v(g.edge_index(edges[k].first, edges[k].second)) = vals[k];
  return PartialMatrix(g, v);
}

void write_partial(std::ostream& out, const PartialMatrix& p) {
  out << "psdc 1\n" << "n " << p.graph.n() << '\n';
  for (Index k = 0; k < p.graph.num_edges(); ++k) {
    const Edge& e = p.graph.edges()[static_cast<size_t>(k)];
    out << e.first + 1 << ' ' << e.second + 1 << ' ' << format_double(p.values(k)) << '\n';
  }
}

}  // namespace facered
