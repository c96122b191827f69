#pragma once

#include "facered/conic.hpp"
#include "facered/cones.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace facered {

using Edge = std::pair<Index, Index>;  // 0-based, first ≤ second

/// Undirected graph on nodes 0..n-1. Edges are stored normalized (i ≤ j),
/// deduplicated and sorted.
class ObservationGraph {
 public:
  ObservationGraph() = default;
  /// With `require_loops`, every ii must be present (InvalidArgument otherwise).
  ObservationGraph(Index n, std::vector<Edge> edges, bool require_loops = true);

  /// Same edges plus every self-loop ii.
  static ObservationGraph with_loops(Index n, std::vector<Edge> edges);

  Index n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  Index num_edges() const { return static_cast<Index>(edges_.size()); }
  /// Position of edge {i,j} in edges(), or -1.
  Index edge_index(Index i, Index j) const;
  bool adjacent(Index i, Index j) const { return i != j && edge_index(i, j) >= 0; }
  /// Sorted neighbors of v, excluding v itself.
  const std::vector<Index>& neighbors(Index v) const { return adj_[static_cast<size_t>(v)]; }

 private:
  Index n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Index>> adj_;
};

/// Values ω on the edges of a graph, aligned with graph.edges().
struct PartialMatrix {
  ObservationGraph graph;
  Vector values;

  PartialMatrix() = default;
  PartialMatrix(ObservationGraph g, Vector v);

  std::optional<double> value(Index i, Index j) const;
  /// ω[α] for a clique α (all pairs, diagonal included, must be observed).
  SymMatrix principal(const std::vector<Index>& alpha) const;
};

/// P_E(X): the entries of X on the edges.
Vector project_E(const SymMatrix& x, const ObservationGraph& g);
/// P_E*(v): v_ij placed at (i,j) and (j,i), zeros elsewhere.
SymMatrix pad_E_star(const Vector& v, const ObservationGraph& g);
/// Inner product on R^E that makes pad_E_star the adjoint of project_E
/// (off-diagonal edges count twice).
double edge_inner(const ObservationGraph& g, const Vector& u, const Vector& v);

struct ChordalityResult {
  bool chordal = false;
  std::vector<Index> elimination_order;  // perfect elimination order when chordal
  std::vector<Index> chordless_cycle;    // length ≥ 4 when not chordal
};

ChordalityResult is_chordal(const ObservationGraph& g);

/// Maximal cliques (self-loops ignored). Each clique is sorted; the list is
/// sorted lexicographically.
std::vector<std::vector<Index>> maximal_cliques(const ObservationGraph& g);

/// Exposing vector of face(ω[α]) padded to n×n: λ_max(ω[α]) times the
/// projector onto the numerical kernel of ω[α] (the plain projector when
/// ω[α] = 0). Zero when ω[α] is definite. Throws PartialNotPsd.
SymMatrix clique_exposing(const PartialMatrix& p, const std::vector<Index>& alpha,
                          double tol = 1e-9);

/// Σ_α W_α as returned by clique_exposing.
SymMatrix clique_exposing_sum(const PartialMatrix& p,
                              const std::vector<std::vector<Index>>& cliques,
                              double tol = 1e-9);

/// Face exposed by the sum of the unit-trace clique exposing vectors.
FaceRep combined_face(const PartialMatrix& p,
                      const std::vector<std::vector<Index>>& cliques, double tol = 1e-9);

/// The completion feasibility problem {X ⪰ 0 : X_ij = ω_ij, ij ∈ E}, written
/// over the face: variables R with X = V R Vᵀ.
ConicProblem completion_problem(const PartialMatrix& p, const FaceRep& face);

/// Completion on the face: least squares in R, then Dykstra as fallback.
std::optional<SymMatrix> complete(const PartialMatrix& p, const FaceRep& face,
                                  Index iters = 20000, double tol = 1e-9);

struct CompletionReduction {
  ChordalityResult chordality;
  std::vector<std::vector<Index>> cliques;
  FaceRep face = FaceRep::whole(0);
  std::vector<std::string> warnings;
};

/// Maximal cliques → combined face, with a warning on non-chordal graphs
/// where cliques need not reveal the minimal face.
CompletionReduction reduce_completion(const PartialMatrix& p, double tol = 1e-9);

/// max over the unobserved entries of λ_min of the filled matrix, and the
/// maximizing fill. Supports up to three unobserved pairs.
std::pair<double, SymMatrix> best_min_eigenvalue(const PartialMatrix& p);

/// Smallest ε in [lo, hi] for which family(ε) is PSD completable, by
/// bisection on best_min_eigenvalue ≥ 0. Throws BadBracket unless lo is
/// infeasible and hi feasible.
double boundary_epsilon(const std::function<PartialMatrix(double)>& family, double lo,
                        double hi, double tol = 1e-9);

/// The 4-cycle family C(ε): diagonal 1+ε, X12 = X23 = X34 = 1, X14 = -1.
PartialMatrix cycle_family(double eps);

/// Banded all-ones partial matrix (|i-j| ≤ 1) of order n.
PartialMatrix banded_ones(Index n);

/// The 4×4 path example with entries 1,1,1 / 1,1 / 1,-1 / 2.
PartialMatrix path_example();

/// Text format: "psdc 1", "n <n>", then "i j value" lines (1-based).
PartialMatrix read_partial(std::istream& in);
void write_partial(std::ostream& out, const PartialMatrix& p);

}  // namespace facered
