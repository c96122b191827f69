#pragma once

#include "facered/cones.hpp"
#include "facered/error.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace facered {

struct Observation {
  Index i;
  Index j;
  double value;
  bool operator==(const Observation&) const = default;
};

/// Entries z_ij of an m×n matrix on an observed set E, with target rank r.
class BipartiteObservations {
 public:
  BipartiteObservations() = default;
  BipartiteObservations(Index m, Index n, Index r, std::vector<Observation> entries);

  Index m() const { return m_; }
  Index n() const { return n_; }
  Index r() const { return r_; }
  const std::vector<Observation>& entries() const { return entries_; }
  bool observed(Index i, Index j) const { return index_(i, j) >= 0; }
  double value(Index i, Index j) const;
  /// Sorted observed columns of row i.
  const std::vector<Index>& row_support(Index i) const { return rows_[static_cast<size_t>(i)]; }
  const std::vector<Index>& col_support(Index j) const { return cols_[static_cast<size_t>(j)]; }

 private:
  Index m_ = 0, n_ = 0, r_ = 1;
  std::vector<Observation> entries_;
  Eigen::MatrixXi index_;
  std::vector<std::vector<Index>> rows_, cols_;
};

/// Fully observed submatrix: sorted row and column index sets.
struct Block {
  std::vector<Index> rows;
  std::vector<Index> cols;
  bool operator==(const Block&) const = default;
  bool operator<(const Block& o) const { return std::tie(rows, cols) < std::tie(o.rows, o.cols); }
};

/// Greedy search for fully observed blocks of size at least p_min×q_min.
/// From every row (then every column) the partners sharing the most observed
/// entries are added while the common support keeps q_min entries; the prefix
/// with the largest exposing rank (p−r)+(q−r) is kept. Deduplicated, sorted.
std::vector<Block> find_blocks(const BipartiteObservations& obs, Index p_min, Index q_min,
                               Index max_blocks);

/// W̄ of order m+n: Ē Ēᵀ on the block rows and F̄ F̄ᵀ on the block columns
/// (offset by m), Ē, F̄ orthonormal bases of the left and right kernels of
/// z[block]. Throws RankMismatch unless z[block] has numerical rank r
/// (σ_i > tol·σ_1), InvalidArgument unless p, q > r.
SymMatrix block_exposing(const BipartiteObservations& obs, const Block& block, double tol = 1e-9);

/// Orthonormal kernel bases of the row and column halves of Σ W̄.
struct SideBases {
  Matrix rows;  // m×k_U
  Matrix cols;  // n×k_V
};
SideBases lrmc_side_bases(const BipartiteObservations& obs, const std::vector<Block>& blocks,
                          double tol = 1e-9);

/// Face exposed by Σ W̄: basis blockdiag(rows, cols) of order m+n.
FaceRep lrmc_face(const BipartiteObservations& obs, const std::vector<Block>& blocks,
                  double tol = 1e-9);

struct LrmcResult {
  std::optional<Matrix> z;
  std::optional<ErrorKind> diagnostic;  // FaceTooBig or RankMismatch on failure
  std::string message;
  Index blocks = 0;
  Index row_dim = 0;  // k_U
  Index col_dim = 0;  // k_V
  Index rank = 0;     // numerical rank of the recovered Z
  double residual = 0.0;  // ‖P_E(Z) − z‖ / ‖z‖
  std::vector<std::string> warnings;
};

/// Blocks → face → least squares for the off-diagonal block R₁₂ of
/// Y = V R Vᵀ with Z = V_U R₁₂ V_Vᵀ. Blocks whose rank is not r are skipped
/// with a warning. Fails with FaceTooBig when a side exceeds r+2 and when the
/// observed-entry residual exceeds tol_residual.
LrmcResult lrmc_recover(const BipartiteObservations& obs, double tol = 1e-9,
                        double tol_residual = 1e-8);

/// Y = [U; V] Σ [U; V]ᵀ from the compact SVD Z = U Σ Vᵀ.
SymMatrix nuclear_lift(const Matrix& z);

/// Σ σ_i(Z).
double nuclear_norm(const Matrix& z);

struct PlantedLrmc {
  BipartiteObservations obs;
  Matrix truth;
};

/// Z = P Qᵀ with Gaussian factors, each entry observed with probability
/// `density`.
PlantedLrmc lrmc_generate(Index m, Index n, Index r, double density, std::uint64_t seed);

/// ‖Z − truth‖ / ‖truth‖ over the unobserved entries.
double heldout_residual(const BipartiteObservations& obs, const Matrix& z, const Matrix& truth);

/// Text format: "lrmc 1", "m <m> n <n> r <r>", then "i j value" lines (1-based).
BipartiteObservations read_lrmc(std::istream& in);
void write_lrmc(std::ostream& out, const BipartiteObservations& obs);
void write_matrix_csv(std::ostream& out, const Matrix& z);

}  // namespace facered
