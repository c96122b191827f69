#pragma once

#include "facered/completion_psd.hpp"
#include "facered/cones.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

namespace facered {

/// Squared distances d_ij on the edges (i < j, no self-loops) of a graph,
/// to be realized in R^r.
struct EdmInstance {
  ObservationGraph graph;
  Vector d;
  Index r = 2;

  EdmInstance() = default;
  EdmInstance(ObservationGraph g, Vector d, Index r);
  Index n() const { return graph.n(); }
};

struct SnlInstance {
  EdmInstance edm;
  std::map<Index, Vector> anchors;  // node -> known position
  std::optional<Matrix> truth;      // n×r true positions
};

/// K(X)_ij = X_ii + X_jj - 2 X_ij.
SymMatrix kappa(const SymMatrix& x);
/// K*(D) = 2 (Diag(De) - D).
SymMatrix kappa_star(const SymMatrix& d);
/// K†(D) = -½ J D J with J = I - eeᵀ/n.
SymMatrix kappa_dagger(const SymMatrix& d);

/// Squared distances of a clique as a dense k×k matrix (all pairs must be edges).
SymMatrix clique_distances(const EdmInstance& inst, const std::vector<Index>& alpha);

/// Projector onto e⊥ ∩ range(K†(d[α]))⊥ in R^α, padded to n×n. Throws NotEdm
/// when K†(d[α]) is indefinite beyond tol.
SymMatrix clique_exposing_edm(const EdmInstance& inst, const std::vector<Index>& alpha,
                              double tol = 1e-9);

/// Noise-tolerant variant: nearest centered PSD matrix to K†(d[α]), top r
/// eigenvectors kept, the rest of e⊥ exposed.
SymMatrix clique_exposing_edm_robust(const EdmInstance& inst, const std::vector<Index>& alpha);

/// Σ_α of the exposing vectors above in sorted clique order.
SymMatrix edm_exposing_sum(const EdmInstance& inst, const std::vector<std::vector<Index>>& cliques,
                           bool robust, double tol = 1e-9);

/// Centered face from exact clique exposing vectors: the kernel of their sum
/// inside e⊥.
FaceRep clique_face_edm(const EdmInstance& inst, const std::vector<std::vector<Index>>& cliques,
                        double tol = 1e-9);

/// Centered face spanned by the eigenvectors of the `dim` smallest eigenvalues
/// of W restricted to e⊥.
FaceRep smallest_centered_face(const SymMatrix& w, Index dim);

/// Number of eigenvalues of W restricted to e⊥ that are ≤ rel·λ_max.
Index centered_kernel_dim(const SymMatrix& w, double rel = 1e-10);

/// Smallest k in [r, max_dim] with a spectral gap λ_{k+1} > gap·max(λ_k, rel·λ_max)
/// among the eigenvalues of W restricted to e⊥ (ascending). Empty when none.
std::optional<Index> gapped_face_dim(const SymMatrix& w, Index r, Index max_dim, double gap = 10.0,
                                     double rel = 1e-10);

/// Robust face: best rank n-(r+1) approximation of the summed robust exposing
/// vectors, kernel taken inside e⊥ (dimension r).
FaceRep robust_face(const EdmInstance& inst, const std::vector<std::vector<Index>>& cliques,
                    double tol = 1e-9);

/// Points (n×r) from X = V R Vᵀ with every edge constraint linear in R.
/// Empty when the worst edge misfit exceeds tol·(1 + max d).
std::optional<Matrix> gram_solve(const FaceRep& face, const EdmInstance& inst, double tol = 1e-8);

struct Alignment {
  Matrix q;       // r×r orthogonal (reflections allowed)
  Vector t;       // translation
  Matrix points;  // aligned rows: q p + t
};

/// Orthogonal Procrustes on the anchor rows. Throws TooFewAnchors without anchors.
Alignment procrustes_align(const Matrix& points, const std::map<Index, Vector>& anchors);

/// (1/n Σ ‖p_i - q_i‖²)^{1/2}.
double rmsd(const Matrix& points, const Matrix& truth);

/// Uniform points in [0,1]^r, edges for pairs within `range`, first
/// `m_anchors` nodes anchored, squared distances scaled by (1+η)² with η
/// uniform in ±noise_factor.
SnlInstance snl_generate(Index n, Index m_anchors, double range, Index r, std::uint64_t seed,
                         double noise_factor = 0.0);

/// Cliques grown greedily from each node through its nearest neighbors,
/// capped at size r+6 and 4n cliques, deduplicated and sorted.
std::vector<std::vector<Index>> greedy_cliques(const EdmInstance& inst);

struct SnlOptions {
  double residual_tol = 1e-6;  // relative edge misfit accepted by gram_solve
  double tol = 1e-9;
};

struct SnlResult {
  Matrix points;  // aligned when anchors exist
  Index cliques = 0;
  Index face_dim = 0;      // centered face dimension used
  Index achieved_dim = 0;  // gapped dimension, or the kernel dimension on failure
  double max_edge_misfit = 0.0;
  std::optional<double> rmsd;
};

/// Clique cover → robust exposing sum → gapped face → gram_solve → Procrustes
/// → RMSD. Throws FaceTooBig when the graph is disconnected or no spectral gap
/// exists at dimension ≤ r+2.
SnlResult snl_localize(const SnlInstance& inst, const SnlOptions& opt = {});

/// Text format: "snl 1", "n <n> r <r> anchors <m>", then "edge i j dsq",
/// "anchor i x…", "truth i x…" lines (1-based).
SnlInstance read_snl(std::istream& in);
void write_snl(std::ostream& out, const SnlInstance& inst);
void write_points_csv(std::ostream& out, const Matrix& points);

}  // namespace facered
