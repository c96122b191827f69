#include "facered/completion_edm.hpp"

#include "facered/error.hpp"
#include "facered/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <random>
#include <set>

namespace facered {

EdmInstance::EdmInstance(ObservationGraph g, Vector dist, Index rank)
    : graph(std::move(g)), d(std::move(dist)), r(rank) {
  if (d.size() != graph.num_edges()) throw Error(ErrorKind::DimensionMismatch, "one d per edge");
  if (r < 1) throw Error(ErrorKind::InvalidArgument, "embedding dimension must be >= 1");
  for (const Edge& e : graph.edges())
    if (e.first == e.second) throw Error(ErrorKind::InvalidArgument, "EDM graphs have no loops");
  if (d.size() && d.minCoeff() < 0.0) throw Error(ErrorKind::NotEdm, "negative squared distance");
}

SymMatrix kappa(const SymMatrix& x) {
  const Vector diag = x.mat().diagonal();
  const Index n = x.n();
  Matrix out = diag * Vector::Ones(n).transpose() + Vector::Ones(n) * diag.transpose() - 2.0 * x.mat();
  out.diagonal().setZero();
  return SymMatrix(out);
}

SymMatrix kappa_star(const SymMatrix& d) {
  const Vector rows = d.mat() * Vector::Ones(d.n());
  return SymMatrix(Matrix(2.0 * (Matrix(rows.asDiagonal()) - d.mat())));
}

SymMatrix kappa_dagger(const SymMatrix& d) {
  const Matrix j = centering_projector(d.n()).mat();
  return SymMatrix(Matrix(-0.5 * j * d.mat() * j));
}

SymMatrix clique_distances(const EdmInstance& inst, const std::vector<Index>& alpha) {
  const Index k = static_cast<Index>(alpha.size());
  SymMatrix out(k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = a + 1; b < k; ++b) {
      const Index e = inst.graph.edge_index(alpha[static_cast<size_t>(a)], alpha[static_cast<size_t>(b)]);
      if (e < 0) throw Error(ErrorKind::InvalidArgument, "clique has a missing distance");
      out.set(a, b, inst.d(e));
    }
  }
  return out;
}

namespace {

SymMatrix pad(const Matrix& block, const std::vector<Index>& alpha, Index n) {
  SymMatrix out(n);
  for (size_t a = 0; a < alpha.size(); ++a)
    for (size_t b = a; b < alpha.size(); ++b)
      out.set(alpha[a], alpha[b], block(static_cast<Index>(a), static_cast<Index>(b)));
  return out;
}

}  // namespace

SymMatrix clique_exposing_edm(const EdmInstance& inst, const std::vector<Index>& alpha, double tol) {
  const SymMatrix g = kappa_dagger(clique_distances(inst, alpha));
  const Spectrum s = sym_eig(g);
  const Index k = g.n();
  const double top = k ? std::max(s.values.cwiseAbs().maxCoeff(), 1.0) : 1.0;
  if (k && s.values(k - 1) < -tol * top) {
    throw Error(ErrorKind::NotEdm, "clique distances are not Euclidean");
  }
  Matrix expose = centering_projector(k).mat();
  for (Index i = 0; i < k; ++i)
    if (s.values(i) > tol * top) expose -= s.vectors.col(i) * s.vectors.col(i).transpose();
  return pad(expose, alpha, inst.n());
}

SymMatrix clique_exposing_edm_robust(const EdmInstance& inst, const std::vector<Index>& alpha) {
  const SymMatrix g = nearest_psd(kappa_dagger(clique_distances(inst, alpha)), true);
  const Spectrum s = sym_eig(g);
  const Index k = g.n();
  Matrix expose = centering_projector(k).mat();
  for (Index i = 0; i < std::min(inst.r, k - 1); ++i) {
    if (s.values(i) > 0.0) expose -= s.vectors.col(i) * s.vectors.col(i).transpose();
  }
  return pad(expose, alpha, inst.n());
}

SymMatrix edm_exposing_sum(const EdmInstance& inst, const std::vector<std::vector<Index>>& cliques,
                           bool robust, double tol) {
  std::vector<std::vector<Index>> sorted = cliques;
  std::sort(sorted.begin(), sorted.end());
  Matrix sum = Matrix::Zero(inst.n(), inst.n());
  for (const auto& alpha : sorted) {
    // Accumulate only the clique block.
    const SymMatrix w = robust ? clique_exposing_edm_robust(inst, alpha)
                               : clique_exposing_edm(inst, alpha, tol);
    for (Index a : alpha)
      for (Index b : alpha) sum(a, b) += w(a, b);
  }
  return SymMatrix(sum);
}

namespace {

Spectrum centered_spectrum(const SymMatrix& w, Matrix& basis) {
  basis = centered_basis(w.n());
  return sym_eig(w.congruence(basis));
}

}  // namespace

Index centered_kernel_dim(const SymMatrix& w, double rel) {
  Matrix c;
  const Spectrum s = centered_spectrum(w, c);
  const double top = s.values.size() ? std::max(s.values(0), 0.0) : 0.0;
  Index k = 0;
  for (Index i = 0; i < s.values.size(); ++i)
    if (s.values(i) <= rel * top) ++k;
  return k;
}

std::optional<Index> gapped_face_dim(const SymMatrix& w, Index r, Index max_dim, double gap,
                                     double rel) {
  Matrix c;
  const Spectrum s = centered_spectrum(w, c);
  const Index m = s.values.size();
  if (m == 0) return 0;
  const Vector asc = s.values.reverse();
  const double floor = rel * std::max(asc(m - 1), 0.0);
  for (Index k = std::min(r, m); k <= std::min(max_dim, m); ++k) {
    if (k == m) return k;
    const double below = k > 0 ? std::max(asc(k - 1), floor) : floor;
    if (asc(k) > gap * below) return k;
  }
  return std::nullopt;
}

FaceRep smallest_centered_face(const SymMatrix& w, Index dim) {
  Matrix c;
  const Spectrum s = centered_spectrum(w, c);
  const Index m = s.values.size();
  dim = std::clamp<Index>(dim, 0, m);
  return FaceRep(Matrix(c * s.vectors.rightCols(dim)));
}

FaceRep clique_face_edm(const EdmInstance& inst, const std::vector<std::vector<Index>>& cliques,
                        double tol) {
  const SymMatrix w = edm_exposing_sum(inst, cliques, false, tol);
  const Matrix c = centered_basis(inst.n());
  const Matrix k = nullspace_basis(w.congruence(c), tol);
  return FaceRep(Matrix(c * k));
}

FaceRep robust_face(const EdmInstance& inst, const std::vector<std::vector<Index>>& cliques,
                    double /*tol*/) {
  if (cliques.empty()) return FaceRep(centered_basis(inst.n()));
  return smallest_centered_face(edm_exposing_sum(inst, cliques, true), inst.r);
}

std::optional<Matrix> gram_solve(const FaceRep& face, const EdmInstance& inst, double tol) {
  const Matrix& v = face.basis();
  const Index k = v.cols();
  const Index m = inst.graph.num_edges();
  const Index unknowns = k * (k + 1) / 2;
  Matrix rows(m, unknowns);
  for (Index e = 0; e < m; ++e) {
    const Edge& ed = inst.graph.edges()[static_cast<size_t>(e)];
    const Vector u = (v.row(ed.first) - v.row(ed.second)).transpose();
    rows.row(e) = svec(SymMatrix::outer(u)).transpose();
  }
  Vector z = Vector::Zero(unknowns);
  if (m > 0 && unknowns > 0) z = rows.colPivHouseholderQr().solve(inst.d);
  const Spectrum s = sym_eig(nearest_psd(smat(z)));
  const Index r = std::min(inst.r, k);
  Matrix factor(k, r);
  for (Index i = 0; i < r; ++i) factor.col(i) = s.vectors.col(i) * std::sqrt(std::max(s.values(i), 0.0));
  Matrix points = Matrix::Zero(inst.n(), inst.r);
  points.leftCols(r) = v * factor;

  const double dmax = m ? inst.d.maxCoeff() : 0.0;
  double worst = 0.0;
  for (Index e = 0; e < m; ++e) {
    const Edge& ed = inst.graph.edges()[static_cast<size_t>(e)];
    worst = std::max(worst, std::abs((points.row(ed.first) - points.row(ed.second)).squaredNorm() - inst.d(e)));
  }
  if (worst > tol * (1.0 + dmax)) return std::nullopt;
  return points;
}

Alignment procrustes_align(const Matrix& points, const std::map<Index, Vector>& anchors) {
  if (anchors.empty()) throw Error(ErrorKind::TooFewAnchors, "Procrustes needs an anchor");
  const Index r = points.cols();
  Vector pbar = Vector::Zero(r);
  Vector abar = Vector::Zero(r);
  for (const auto& [id, pos] : anchors) {
    if (id < 0 || id >= points.rows() || pos.size() != r) {
      throw Error(ErrorKind::DimensionMismatch, "anchor does not match the points");
    }
    pbar += points.row(id).transpose();
    abar += pos;
  }
  pbar /= static_cast<double>(anchors.size());
  abar /= static_cast<double>(anchors.size());
  Matrix h = Matrix::Zero(r, r);
  for (const auto& [id, pos] : anchors) h += (points.row(id).transpose() - pbar) * (pos - abar).transpose();
  Eigen::JacobiSVD<Matrix> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Alignment out;
  out.q = svd.matrixV() * svd.matrixU().transpose();
  out.t = abar - out.q * pbar;
  out.points = (points * out.q.transpose()).rowwise() + out.t.transpose();
  return out;
}

double rmsd(const Matrix& points, const Matrix& truth) {
  if (points.rows() != truth.rows() || points.cols() != truth.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "rmsd: point sets differ in shape");
  }
  if (points.rows() == 0) return 0.0;
  return std::sqrt((points - truth).squaredNorm() / static_cast<double>(points.rows()));
}

SnlInstance snl_generate(Index n, Index m_anchors, double range, Index r, std::uint64_t seed,
                         double noise_factor) {
  if (n < 1 || r < 1 || m_anchors < 0 || m_anchors > n) {
    throw Error(ErrorKind::InvalidArgument, "bad SNL generator sizes");
  }
  if (!(noise_factor >= 0.0 && noise_factor < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "noise factor must lie in [0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix truth(n, r);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < r; ++k) truth(i, k) = unit(rng);
  std::vector<Edge> edges;
  std::vector<double> dist;
  std::uniform_real_distribution<double> eta(-noise_factor, noise_factor);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double sq = (truth.row(i) - truth.row(j)).squaredNorm();
      if (sq > range * range) continue;
      edges.emplace_back(i, j);
      const double f = noise_factor > 0.0 ? 1.0 + eta(rng) : 1.0;
      dist.push_back(sq * f * f);
    }
  }
  SnlInstance inst;
  inst.edm = EdmInstance(ObservationGraph(n, edges, false),
                         Eigen::Map<Vector>(dist.data(), static_cast<Index>(dist.size())), r);
  for (Index i = 0; i < m_anchors; ++i) inst.anchors[i] = truth.row(i).transpose();
  inst.truth = truth;
  return inst;
}

std::vector<std::vector<Index>> greedy_cliques(const EdmInstance& inst) {
  const Index n = inst.n();
  const size_t cap = static_cast<size_t>(inst.r + 6);
  std::set<std::vector<Index>> found;
  for (Index v = 0; v < n && static_cast<Index>(found.size()) < 4 * n; ++v) {
    std::vector<std::pair<double, Index>> near;
    for (Index u : inst.graph.neighbors(v)) near.emplace_back(inst.d(inst.graph.edge_index(u, v)), u);
    std::sort(near.begin(), near.end());
    std::vector<Index> clique{v};
    for (const auto& [dist, u] : near) {
      if (clique.size() >= cap) break;
      bool ok = true;
      for (Index w : clique) ok = ok && (w == v || inst.graph.adjacent(u, w));
      if (ok) clique.push_back(u);
    }
    std::sort(clique.begin(), clique.end());
    found.insert(clique);
  }
  return {found.begin(), found.end()};
}

namespace {

bool connected(const ObservationGraph& g) {
  if (g.n() == 0) return true;
  std::vector<bool> seen(static_cast<size_t>(g.n()), false);
  std::deque<Index> q{0};
  seen[0] = true;
  Index count = 1;
  while (!q.empty()) {
    const Index u = q.front();
    q.pop_front();
    for (Index w : g.neighbors(u)) {
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = true;
        ++count;
        q.push_back(w);
      }
    }
  }
  return count == g.n();
}

}  // namespace

SnlResult snl_localize(const SnlInstance& inst, const SnlOptions& opt) {
  const EdmInstance& edm = inst.edm;
  const Index r = edm.r;
  SnlResult res;
  std::vector<std::vector<Index>> cliques;
  for (auto& c : greedy_cliques(edm))
    if (static_cast<Index>(c.size()) >= r + 2) cliques.push_back(std::move(c));
  res.cliques = static_cast<Index>(cliques.size());

  const SymMatrix w = edm_exposing_sum(edm, cliques, true);
  const std::optional<Index> dim = gapped_face_dim(w, r, r + 2);
  res.achieved_dim = dim ? *dim : centered_kernel_dim(w);
  if (!connected(edm.graph)) {
    throw Error(ErrorKind::FaceTooBig, "graph is disconnected; face dimension " +
                                           std::to_string(res.achieved_dim));
  }
  if (!dim) {
    throw Error(ErrorKind::FaceTooBig,
                "face dimension " + std::to_string(res.achieved_dim) + " exceeds r+2");
  }
  res.face_dim = *dim;
  const FaceRep face = smallest_centered_face(w, res.face_dim);
  const std::optional<Matrix> pts = gram_solve(face, edm, opt.residual_tol);
  if (!pts) throw Error(ErrorKind::NotEdm, "distances are not realizable on the face");
  res.points = inst.anchors.empty() ? *pts : procrustes_align(*pts, inst.anchors).points;
  for (Index e = 0; e < edm.graph.num_edges(); ++e) {
    const Edge& ed = edm.graph.edges()[static_cast<size_t>(e)];
    res.max_edge_misfit = std::max(
        res.max_edge_misfit,
        std::abs((res.points.row(ed.first) - res.points.row(ed.second)).squaredNorm() - edm.d(e)));
  }
  if (inst.truth) res.rmsd = rmsd(res.points, *inst.truth);
  return res;
}

SnlInstance read_snl(std::istream& in) {
  LineReader rd(in);
  if (rd.expect_keyed("snl") != 1) rd.fail("unsupported snl version");
  std::vector<std::string> t;
  if (!rd.next(t) || t.size() != 6 || t[0] != "n" || t[2] != "r" || t[4] != "anchors") {
    rd.fail("expected 'n <n> r <r> anchors <m>'");
  }
  const long long n = parse_int(t[1]);
  const long long r = parse_int(t[3]);
  const long long m = parse_int(t[5]);
  if (n < 1 || r < 1 || m < 0 || m > n) rd.fail("bad sizes");
  std::vector<Edge> edges;
  std::vector<double> dist;
  std::map<Index, Vector> anchors;
  std::map<Index, Vector> truth;
  auto node = [&](const std::string& s) {
    const long long i = parse_int(s);
    if (i < 1 || i > n) rd.fail("node index out of range");
    return static_cast<Index>(i - 1);
  };
  auto position = [&](const std::vector<std::string>& tok) {
    if (static_cast<long long>(tok.size()) != r + 2) rd.fail("expected r coordinates");
    Vector p(r);
    for (long long k = 0; k < r; ++k) p(k) = parse_double(tok[static_cast<size_t>(k + 2)]);
    return p;
  };
  while (rd.next(t)) {
    if (t[0] == "edge") {
      if (t.size() != 4) rd.fail("expected 'edge i j dsq'");
      Index i = node(t[1]), j = node(t[2]);
      if (i == j) rd.fail("self-loop edge");
      if (i > j) std::swap(i, j);
      edges.emplace_back(i, j);
      dist.push_back(parse_double(t[3]));
    } else if (t[0] == "anchor") {
      if (!anchors.emplace(node(t[1]), position(t)).second) rd.fail("duplicate anchor");
    } else if (t[0] == "truth") {
      if (!truth.emplace(node(t[1]), position(t)).second) rd.fail("duplicate truth row");
    } else {
      rd.fail("unknown record '" + t[0] + "'");
    }
  }
  if (static_cast<long long>(anchors.size()) != m) {
    throw Error(ErrorKind::Parse, "anchor count differs from header");
  }
  std::vector<Edge> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorKind::Parse, "duplicate edge");
  }
  ObservationGraph g(static_cast<Index>(n), edges, false);
  Vector d(g.num_edges());
  for (size_t k = 0; k < edges.size(); ++k) d(g.edge_index(edges[k].first, edges[k].second)) = dist[k];
  SnlInstance inst;
  inst.edm = EdmInstance(g, d, static_cast<Index>(r));
  inst.anchors = std::move(anchors);
  if (!truth.empty()) {
    if (static_cast<long long>(truth.size()) != n) throw Error(ErrorKind::Parse, "partial truth");
    Matrix tm(n, r);
    for (const auto& [i, p] : truth) tm.row(i) = p.transpose();
    inst.truth = tm;
  }
  return inst;
}

void write_snl(std::ostream& out, const SnlInstance& inst) {
  const EdmInstance& e = inst.edm;
  out << "snl 1\n"
      << "n " << e.n() << " r " << e.r << " anchors " << inst.anchors.size() << '\n';
  for (Index k = 0; k < e.graph.num_edges(); ++k) {
    const Edge& ed = e.graph.edges()[static_cast<size_t>(k)];
    out << "edge " << ed.first + 1 << ' ' << ed.second + 1 << ' ' << format_double(e.d(k)) << '\n';
  }
  for (const auto& [i, p] : inst.anchors) {
    out << "anchor " << i + 1;
    for (Index k = 0; k < p.size(); ++k) out << ' ' << format_double(p(k));
    out << '\n';
  }
  if (inst.truth) {
    for (Index i = 0; i < inst.truth->rows(); ++i) {
      out << "truth " << i + 1;
      for (Index k = 0; k < inst.truth->cols(); ++k) out << ' ' << format_double((*inst.truth)(i, k));
      out << '\n';
    }
  }
}

void write_points_csv(std::ostream& out, const Matrix& points) {
  out << "id";
  for (Index k = 0; k < points.cols(); ++k) out << ",x" << k + 1;
  out << '\n';
  for (Index i = 0; i < points.rows(); ++i) {
    out << i + 1;
    for (Index k = 0; k < points.cols(); ++k) out << ',' << format_double(points(i, k));
    out << '\n';
  }
}

}  // namespace facered
