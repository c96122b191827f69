#include "facered/lrmc.hpp"

#include "facered/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <set>

namespace facered {

BipartiteObservations::BipartiteObservations(Index m, Index n, Index r, std::vector<Observation> entries)
    : m_(m), n_(n), r_(r), entries_(std::move(entries)) {
  if (m < 1 || n < 1) throw Error(ErrorKind::InvalidArgument, "empty matrix shape");
  if (r < 1) throw Error(ErrorKind::InvalidArgument, "target rank must be >= 1");
  index_ = Eigen::MatrixXi::Constant(m, n, -1);
  rows_.assign(static_cast<size_t>(m), {});
  cols_.assign(static_cast<size_t>(n), {});
  for (size_t k = 0; k < entries_.size(); ++k) {
    const Observation& o = entries_[k];
    if (o.i < 0 || o.i >= m || o.j < 0 || o.j >= n) {
      throw Error(ErrorKind::InvalidArgument, "observation index out of range");
    }
    if (index_(o.i, o.j) >= 0) throw Error(ErrorKind::InvalidArgument, "duplicate observation");
    index_(o.i, o.j) = static_cast<int>(k);
    rows_[static_cast<size_t>(o.i)].push_back(o.j);
    cols_[static_cast<size_t>(o.j)].push_back(o.i);
  }
  for (auto& v : rows_) std::sort(v.begin(), v.end());
  for (auto& v : cols_) std::sort(v.begin(), v.end());
}

double BipartiteObservations::value(Index i, Index j) const {
  const int k = index_(i, j);
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "entry is not observed");
  return entries_[static_cast<size_t>(k)].value;
}

namespace {

std::vector<Index> intersect(const std::vector<Index>& a, const std::vector<Index>& b) {
  std::vector<Index> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Greedy growth from `seed` over one side; supports are the observed sets of
// that side. Returns (chosen seeds side, common support) or nothing.
std::optional<std::pair<std::vector<Index>, std::vector<Index>>> grow(
    Index seed, const std::vector<std::vector<Index>>& support, Index p_min, Index q_min, Index r) {
  std::vector<Index> common = support[static_cast<size_t>(seed)];
  if (static_cast<Index>(common.size()) < q_min) return std::nullopt;
  std::vector<Index> chosen{seed};
  std::vector<Index> best_rows;
  std::vector<Index> best_cols;
  Index best_score = -1;
  std::vector<bool> used(support.size(), false);
  used[static_cast<size_t>(seed)] = true;
  for (;;) {
    if (static_cast<Index>(chosen.size()) >= p_min) {
      const Index score = (static_cast<Index>(chosen.size()) - r) + (static_cast<Index>(common.size()) - r);
      if (score > best_score) {
        best_score = score;
        best_rows = chosen;
        best_cols = common;
      }
    }
    Index pick = -1;
    std::vector<Index> pick_common;
    for (size_t k = 0; k < support.size(); ++k) {
      if (used[k]) continue;
      std::vector<Index> c = intersect(common, support[k]);
      if (static_cast<Index>(c.size()) >= q_min && c.size() > pick_common.size()) {
        pick = static_cast<Index>(k);
        pick_common = std::move(c);
      }
    }
    if (pick < 0) break;
    used[static_cast<size_t>(pick)] = true;
    chosen.push_back(pick);
    common = std::move(pick_common);
  }
  if (best_score < 0) return std::nullopt;
  std::sort(best_rows.begin(), best_rows.end());
  return std::make_pair(best_rows, best_cols);
}

// z[block] as a dense p×q matrix.
Matrix block_values(const BipartiteObservations& obs, const Block& b) {
  Matrix z(static_cast<Index>(b.rows.size()), static_cast<Index>(b.cols.size()));
  for (size_t a = 0; a < b.rows.size(); ++a)
    for (size_t c = 0; c < b.cols.size(); ++c)
      z(static_cast<Index>(a), static_cast<Index>(c)) = obs.value(b.rows[a], b.cols[c]);
  return z;
}

// Ē and F̄ for a block.
std::pair<Matrix, Matrix> block_kernels(const BipartiteObservations& obs, const Block& b, double tol) {
  const Index r = obs.r();
  const Index p = static_cast<Index>(b.rows.size());
  const Index q = static_cast<Index>(b.cols.size());
  if (p <= r || q <= r) throw Error(ErrorKind::InvalidArgument, "block sides must exceed r");
  Eigen::JacobiSVD<Matrix> svd(block_values(obs, b), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++rank;
  if (s.size() == 0 || s(0) == 0.0) rank = 0;
  if (rank != r) {
    throw Error(ErrorKind::RankMismatch,
                "block has rank " + std::to_string(rank) + ", expected " + std::to_string(r));
  }
  return {svd.matrixU().rightCols(p - r), svd.matrixV().rightCols(q - r)};
}

}  // namespace

std::vector<Block> find_blocks(const BipartiteObservations& obs, Index p_min, Index q_min,
                               Index max_blocks) {
  std::vector<std::vector<Index>> row_sup(static_cast<size_t>(obs.m()));
  std::vector<std::vector<Index>> col_sup(static_cast<size_t>(obs.n()));
  for (Index i = 0; i < obs.m(); ++i) row_sup[static_cast<size_t>(i)] = obs.row_support(i);
  for (Index j = 0; j < obs.n(); ++j) col_sup[static_cast<size_t>(j)] = obs.col_support(j);
  std::set<Block> found;
  auto full = [&] { return max_blocks >= 0 && static_cast<Index>(found.size()) >= max_blocks; };
  for (Index i = 0; i < obs.m() && !full(); ++i) {
    if (auto g = grow(i, row_sup, p_min, q_min, obs.r())) found.insert(Block{g->first, g->second});
  }
  for (Index j = 0; j < obs.n() && !full(); ++j) {
    if (auto g = grow(j, col_sup, q_min, p_min, obs.r())) found.insert(Block{g->second, g->first});
  }
  return {found.begin(), found.end()};
}

SymMatrix block_exposing(const BipartiteObservations& obs, const Block& block, double tol) {
  const auto [e, f] = block_kernels(obs, block, tol);
  Matrix w = Matrix::Zero(obs.m() + obs.n(), obs.m() + obs.n());
  const Matrix ee = e * e.transpose();
  const Matrix ff = f * f.transpose();
  for (size_t a = 0; a < block.rows.size(); ++a)
    for (size_t b = 0; b < block.rows.size(); ++b)
      w(block.rows[a], block.rows[b]) = ee(static_cast<Index>(a), static_cast<Index>(b));
  for (size_t a = 0; a < block.cols.size(); ++a)
    for (size_t b = 0; b < block.cols.size(); ++b)
      w(obs.m() + block.cols[a], obs.m() + block.cols[b]) = ff(static_cast<Index>(a), static_cast<Index>(b));
  return SymMatrix(w);
}

SideBases lrmc_side_bases(const BipartiteObservations& obs, const std::vector<Block>& blocks, double tol) {
  std::vector<Block> sorted = blocks;
  std::sort(sorted.begin(), sorted.end());
  Matrix wu = Matrix::Zero(obs.m(), obs.m());
  Matrix wv = Matrix::Zero(obs.n(), obs.n());
  for (const Block& b : sorted) {
    const auto [e, f] = block_kernels(obs, b, tol);
    const Matrix ee = e * e.transpose();
    const Matrix ff = f * f.transpose();
    for (size_t a = 0; a < b.rows.size(); ++a)
      for (size_t c = 0; c < b.rows.size(); ++c)
        wu(b.rows[a], b.rows[c]) += ee(static_cast<Index>(a), static_cast<Index>(c));
    for (size_t a = 0; a < b.cols.size(); ++a)
      for (size_t c = 0; c < b.cols.size(); ++c)
        wv(b.cols[a], b.cols[c]) += ff(static_cast<Index>(a), static_cast<Index>(c));
  }
  // Kernel cutoff is relative to the largest eigenvalue of each half.
  const double kernel_tol = std::max(tol, default_rank_tol(std::max(obs.m(), obs.n())));
  return {nullspace_basis(SymMatrix(wu), kernel_tol), nullspace_basis(SymMatrix(wv), kernel_tol)};
}

FaceRep lrmc_face(const BipartiteObservations& obs, const std::vector<Block>& blocks, double tol) {
  const SideBases s = lrmc_side_bases(obs, blocks, tol);
  Matrix v = Matrix::Zero(obs.m() + obs.n(), s.rows.cols() + s.cols.cols());
  v.topLeftCorner(obs.m(), s.rows.cols()) = s.rows;
  v.bottomRightCorner(obs.n(), s.cols.cols()) = s.cols;
  return FaceRep(v);
}

LrmcResult lrmc_recover(const BipartiteObservations& obs, double tol, double tol_residual) {
  LrmcResult res;
  const Index r = obs.r();
  std::vector<Block> blocks;
  for (Block& b : find_blocks(obs, r + 1, r + 1, 2 * (obs.m() + obs.n()))) {
    try {
      block_kernels(obs, b, tol);
      blocks.push_back(std::move(b));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::RankMismatch) throw;
      res.warnings.push_back(std::string("skipped block: ") + e.what());
    }
  }
  res.blocks = static_cast<Index>(blocks.size());
  const SideBases s = lrmc_side_bases(obs, blocks, tol);
  res.row_dim = s.rows.cols();
  res.col_dim = s.cols.cols();
  if (res.row_dim > r + 2 || res.col_dim > r + 2) {
    res.diagnostic = ErrorKind::FaceTooBig;
    res.message = "face dimensions " + std::to_string(res.row_dim) + "+" + std::to_string(res.col_dim) +
                  " exceed r+2 per side";
    return res;
  }
  const Index ku = res.row_dim;
  const Index kv = res.col_dim;
  const auto& entries = obs.entries();
  Matrix a(static_cast<Index>(entries.size()), ku * kv);
  Vector rhs(static_cast<Index>(entries.size()));
  for (size_t e = 0; e < entries.size(); ++e) {
    const Observation& o = entries[e];
    // z_ij = Σ_ab V_U(i,a) R12(a,b) V_V(j,b), R12 stored column-major.
    for (Index b = 0; b < kv; ++b)
      for (Index c = 0; c < ku; ++c)
        a(static_cast<Index>(e), b * ku + c) = s.rows(o.i, c) * s.cols(o.j, b);
    rhs(static_cast<Index>(e)) = o.value;
  }
  Vector x = Vector::Zero(ku * kv);
  if (a.size() > 0) x = a.colPivHouseholderQr().solve(rhs);
  const Matrix r12 = Eigen::Map<const Matrix>(x.data(), ku, kv);
  const Matrix z = s.rows * r12 * s.cols.transpose();

  double num = 0.0;
  for (const Observation& o : entries) num += std::pow(z(o.i, o.j) - o.value, 2);
  const double den = rhs.norm();
  res.residual = den > 0.0 ? std::sqrt(num) / den : std::sqrt(num);
  Eigen::JacobiSVD<Matrix> svd(r12);
  const Vector& sv = svd.singularValues();
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++res.rank;
  if (res.residual > tol_residual) {
    res.diagnostic = ErrorKind::RankMismatch;
    res.message = "observed-entry residual " + format_double(res.residual) + " exceeds tolerance";
    return res;
  }
  res.z = z;
  return res;
}

SymMatrix nuclear_lift(const Matrix& z) {
  Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Matrix uv(z.rows() + z.cols(), svd.singularValues().size());
  uv << svd.matrixU(), svd.matrixV();
  return SymMatrix(Matrix(uv * svd.singularValues().asDiagonal() * uv.transpose()));
}

double nuclear_norm(const Matrix& z) {
  if (z.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(z).singularValues().sum();
}

PlantedLrmc lrmc_generate(Index m, Index n, Index r, double density, std::uint64_t seed) {
  if (!(density > 0.0 && density <= 1.0)) throw Error(ErrorKind::InvalidArgument, "density must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix p(m, r), q(n, r);
  for (Index i = 0; i < m; ++i)
    for (Index k = 0; k < r; ++k) p(i, k) = g(rng);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < r; ++k) q(j, k) = g(rng);
  const Matrix truth = p * q.transpose();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Observation> entries;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (u(rng) < density) entries.push_back({i, j, truth(i, j)});
  return {BipartiteObservations(m, n, r, std::move(entries)), truth};
}

double heldout_residual(const BipartiteObservations& obs, const Matrix& z, const Matrix& truth) {
  if (z.rows() != truth.rows() || z.cols() != truth.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "heldout_residual: shapes differ");
  }
  double num = 0.0, den = 0.0;
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = 0; j < z.cols(); ++j) {
      if (obs.observed(i, j)) continue;
      num += std::pow(z(i, j) - truth(i, j), 2);
      den += truth(i, j) * truth(i, j);
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

BipartiteObservations read_lrmc(std::istream& in) {
  LineReader rd(in);
  if (rd.expect_keyed("lrmc") != 1) rd.fail("unsupported lrmc version");
  std::vector<std::string> t;
  if (!rd.next(t) || t.size() != 6 || t[0] != "m" || t[2] != "n" || t[4] != "r") {
    rd.fail("expected 'm <m> n <n> r <r>'");
  }
  const long long m = parse_int(t[1]);
  const long long n = parse_int(t[3]);
  const long long r = parse_int(t[5]);
  if (m < 1 || n < 1 || r < 1) rd.fail("bad sizes");
  std::vector<Observation> entries;
  while (rd.next(t)) {
    if (t.size() != 3) rd.fail("expected 'i j value'");
    const long long i = parse_int(t[0]);
    const long long j = parse_int(t[1]);
    if (i < 1 || i > m || j < 1 || j > n) rd.fail("index out of range");
    entries.push_back({static_cast<Index>(i - 1), static_cast<Index>(j - 1), parse_double(t[2])});
  }
  return BipartiteObservations(static_cast<Index>(m), static_cast<Index>(n), static_cast<Index>(r),
                               std::move(entries));
}

void write_lrmc(std::ostream& out, const BipartiteObservations& obs) {
  out << "lrmc 1\nm " << obs.m() << " n " << obs.n() << " r " << obs.r() << '\n';
  for (const Observation& o : obs.entries())
    out << o.i + 1 << ' ' << o.j + 1 << ' ' << format_double(o.value) << '\n';
}

void write_matrix_csv(std::ostream& out, const Matrix& z) {
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = 0; j < z.cols(); ++j) out << (j ? "," : "") << format_double(z(i, j));
    out << '\n';
  }
}

}  // namespace facered
