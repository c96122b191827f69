#include "facered/completion_psd.hpp"
#include "facered/error.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

using namespace facered;

namespace {

ObservationGraph path(Index n) {
  std::vector<Edge> e;
  for (Index i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return ObservationGraph::with_loops(n, e);
}

ObservationGraph cycle4() {
  return ObservationGraph::with_loops(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
}

ObservationGraph complete_graph(Index n) {
  std::vector<Edge> e;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return ObservationGraph::with_loops(n, e);
}

// Chordal graph grown by attaching each new node to a clique of size ≥ overlap
// inside an existing clique.
ObservationGraph random_chordal(Index n, Index overlap, std::mt19937& rng) {
  std::vector<std::vector<Index>> cliques;
  std::vector<Index> first(static_cast<size_t>(overlap + 1));
  for (Index i = 0; i <= overlap; ++i) first[static_cast<size_t>(i)] = i;
  cliques.push_back(first);
  std::vector<Edge> edges;
  for (Index i = 0; i <= overlap; ++i)
    for (Index j = i + 1; j <= overlap; ++j) edges.emplace_back(i, j);
  for (Index v = overlap + 1; v < n; ++v) {
    const auto& host = cliques[std::uniform_int_distribution<size_t>(0, cliques.size() - 1)(rng)];
    std::vector<Index> pick = host;
    std::shuffle(pick.begin(), pick.end(), rng);
    const Index size =
        std::uniform_int_distribution<Index>(overlap, static_cast<Index>(pick.size()))(rng);
    pick.resize(static_cast<size_t>(size));
    for (Index u : pick) edges.emplace_back(u, v);
    pick.push_back(v);
    cliques.push_back(pick);
  }
  return ObservationGraph::with_loops(n, edges);
}

Matrix random_factor(Index n, Index r, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Matrix f(n, r);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < r; ++j) f(i, j) = g(rng);
  return f;
}

FaceRep from_columns(const Matrix& cols) {
  return FaceRep(Matrix(Eigen::HouseholderQR<Matrix>(cols).householderQ() *
                        Matrix::Identity(cols.rows(), cols.cols())));
}

}  // namespace

TEST(GraphTest, RequiresLoopsAndNormalizes) {
  EXPECT_THROW(ObservationGraph(2, {{0, 1}}), Error);
  const ObservationGraph g(2, {{1, 0}, {0, 0}, {1, 1}, {0, 1}});
  EXPECT_EQ(g.num_edges(), 3);
  EXPECT_TRUE(g.adjacent(1, 0));
  EXPECT_THROW(ObservationGraph(2, {{0, 2}}, false), Error);
}

TEST(ProjectPadTest, Examples) {
  const ObservationGraph full = complete_graph(3);
  const SymMatrix x{{1, 2, 3}, {2, 4, 5}, {3, 5, 6}};
  EXPECT_EQ(pad_E_star(project_E(x, full), full), x);
  const ObservationGraph p = path(3);
  const SymMatrix padded = pad_E_star(project_E(x, p), p);
  EXPECT_EQ(padded(0, 2), 0.0);
  EXPECT_EQ(padded(0, 1), 2.0);

  const ObservationGraph g = ObservationGraph::with_loops(2, {{0, 1}});
  Vector v = Vector::Zero(3);
  v(g.edge_index(0, 1)) = 1.0;
  EXPECT_EQ(pad_E_star(v, g), (SymMatrix{{0, 1}, {1, 0}}));
  EXPECT_THROW(project_E(SymMatrix(3), g), Error);
}

TEST(ProjectPadTest, AdjointIdentity) {
  std::mt19937 rng(4);
  std::normal_distribution<double> gd;
  for (int t = 0; t < 30; ++t) {
    const ObservationGraph g = random_chordal(8, 1, rng);
    const SymMatrix x(random_factor(8, 8, rng));
    Vector v(g.num_edges());
    for (Index k = 0; k < v.size(); ++k) v(k) = gd(rng);
    EXPECT_NEAR(edge_inner(g, project_E(x, g), v), inner(x, pad_E_star(v, g)), 1e-12);
  }
}

TEST(ChordalTest, Examples) {
  EXPECT_TRUE(is_chordal(path(4)).chordal);
  EXPECT_TRUE(is_chordal(complete_graph(5)).chordal);
  const ChordalityResult c = is_chordal(cycle4());
  EXPECT_FALSE(c.chordal);
  ASSERT_EQ(c.chordless_cycle.size(), 4u);
  std::set<Index> nodes(c.chordless_cycle.begin(), c.chordless_cycle.end());
  EXPECT_EQ(nodes.size(), 4u);
}

TEST(ChordalTest, WitnessIsChordlessCycleAndOrderIsPerfect) {
  std::mt19937 rng(17);
  for (int t = 0; t < 40; ++t) {
    const ObservationGraph g = random_chordal(10, 1 + t % 3, rng);
    const ChordalityResult r = is_chordal(g);
    ASSERT_TRUE(r.chordal);
    std::vector<Index> pos(10);
    for (Index i = 0; i < 10; ++i) pos[static_cast<size_t>(r.elimination_order[static_cast<size_t>(i)])] = i;
    for (Index v = 0; v < 10; ++v) {
      std::vector<Index> later;
      for (Index w : g.neighbors(v))
        if (pos[static_cast<size_t>(w)] > pos[static_cast<size_t>(v)]) later.push_back(w);
      for (size_t a = 0; a < later.size(); ++a)
        for (size_t b = a + 1; b < later.size(); ++b) EXPECT_TRUE(g.adjacent(later[a], later[b]));
    }
  }
  // Long cycles with pendant chords-free structure.
  for (Index n = 4; n <= 9; ++n) {
    std::vector<Edge> e;
    for (Index i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    const ChordalityResult r = is_chordal(ObservationGraph::with_loops(n, e));
    ASSERT_FALSE(r.chordal);
    const auto& cyc = r.chordless_cycle;
    ASSERT_GE(cyc.size(), 4u);
    const ObservationGraph g = ObservationGraph::with_loops(n, e);
    for (size_t a = 0; a < cyc.size(); ++a)
      for (size_t b = a + 1; b < cyc.size(); ++b) {
        const bool consecutive = b == a + 1 || (a == 0 && b == cyc.size() - 1);
        EXPECT_EQ(g.adjacent(cyc[a], cyc[b]), consecutive);
      }
  }
}

TEST(MaximalCliquesTest, Examples) {
  using C = std::vector<std::vector<Index>>;
  EXPECT_EQ(maximal_cliques(path(4)), (C{{0, 1}, {1, 2}, {2, 3}}));
  EXPECT_EQ(maximal_cliques(complete_graph(3)), (C{{0, 1, 2}}));
  EXPECT_EQ(maximal_cliques(cycle4()), (C{{0, 1}, {0, 3}, {1, 2}, {2, 3}}));
  EXPECT_EQ(maximal_cliques(ObservationGraph::with_loops(2, {})), (C{{0}, {1}}));
}

TEST(MaximalCliquesTest, AgreesWithBruteForce) {
  std::mt19937 rng(23);
  std::bernoulli_distribution coin(0.45);
  for (int t = 0; t < 30; ++t) {
    const Index n = 7;
    std::vector<Edge> e;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (coin(rng)) e.emplace_back(i, j);
    const ObservationGraph g = ObservationGraph::with_loops(n, e);
    std::vector<std::vector<Index>> brute;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      std::vector<Index> s;
      for (Index i = 0; i < n; ++i)
        if (mask & (1u << i)) s.push_back(i);
      bool clique = true;
      for (size_t a = 0; a < s.size() && clique; ++a)
        for (size_t b = a + 1; b < s.size() && clique; ++b) clique = g.adjacent(s[a], s[b]);
      if (!clique) continue;
      bool maximal = true;
      for (Index v = 0; v < n && maximal; ++v) {
        if (mask & (1u << v)) continue;
        bool all = true;
        for (Index u : s) all = all && g.adjacent(u, v);
        if (all) maximal = false;
      }
      if (maximal) brute.push_back(s);
    }
    std::sort(brute.begin(), brute.end());
    EXPECT_EQ(maximal_cliques(g), brute);
  }
}

TEST(CliqueExposingTest, Examples) {
  const PartialMatrix p = path_example();
  const SymMatrix w12 = clique_exposing(p, {0, 1});
  EXPECT_LE((w12 - SymMatrix{{1, -1, 0, 0}, {-1, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}).norm(),
            1e-14);
  EXPECT_LE(clique_exposing(p, {2, 3}).norm(), 1e-15);
  const ObservationGraph g = ObservationGraph::with_loops(2, {});
  const PartialMatrix z(g, Vector::Zero(2));
  EXPECT_EQ(clique_exposing(z, {1}), SymMatrix::unit(2, 1, 1));
  const ObservationGraph k2 = complete_graph(2);
  const PartialMatrix bad(k2, project_E(SymMatrix{{1, 2}, {2, 1}}, k2));
  try {
    clique_exposing(bad, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PartialNotPsd);
  }
}

TEST(CombinedFaceTest, PathExample) {
  const PartialMatrix p = path_example();
  const auto cliques = maximal_cliques(p.graph);
  const SymMatrix sum = clique_exposing_sum(p, cliques);
  EXPECT_LE((sum - SymMatrix{{1, -1, 0, 0}, {-1, 2, -1, 0}, {0, -1, 1, 0}, {0, 0, 0, 0}}).norm(),
            1e-14);
  Matrix cols(4, 2);
  cols << 0, 1, 0, 1, 0, 1, 1, 0;
  EXPECT_TRUE(same_face(combined_face(p, cliques), from_columns(cols)));
}

TEST(CombinedFaceTest, BandedOnesIsOneDimensional) {
  for (Index n = 3; n <= 10; ++n) {
    const PartialMatrix p = banded_ones(n);
    const FaceRep f = combined_face(p, maximal_cliques(p.graph));
    ASSERT_EQ(f.dim(), 1);
    EXPECT_TRUE(same_face(f, FaceRep(Matrix(Vector::Ones(n) / std::sqrt(double(n))))));
  }
}

TEST(CombinedFaceTest, DefiniteCliquesGiveWholeCone) {
  const ObservationGraph g = path(3);
  const PartialMatrix p(g, project_E(SymMatrix{{2, 1, 0}, {1, 2, 1}, {0, 1, 2}}, g));
  EXPECT_EQ(combined_face(p, maximal_cliques(g)).dim(), 3);
}

TEST(CompleteTest, PathExampleUniqueCompletion) {
  const PartialMatrix p = path_example();
  const FaceRep f = combined_face(p, maximal_cliques(p.graph));
  const auto x = complete(p, f);
  ASSERT_TRUE(x.has_value());
  const SymMatrix expected{{1, 1, 1, -1}, {1, 1, 1, -1}, {1, 1, 1, -1}, {-1, -1, -1, 2}};
  EXPECT_LE((*x - expected).norm(), 1e-8);
  EXPECT_LE(numerical_rank(sym_eig(*x).values, 1e-8), 2);
}

TEST(CompleteTest, BandedOnesGivesAllOnes) {
  const PartialMatrix p = banded_ones(5);
  const auto x = complete(p, combined_face(p, maximal_cliques(p.graph)));
  ASSERT_TRUE(x.has_value());
  EXPECT_LE((x->mat() - Matrix::Ones(5, 5)).norm(), 1e-10);
}

TEST(CompleteTest, InfeasibleCycleGivesNothing) {
  const PartialMatrix p = cycle_family(0.0);
  const CompletionReduction red = reduce_completion(p);
  EXPECT_FALSE(red.chordality.chordal);
  EXPECT_EQ(red.warnings.size(), 1u);
  EXPECT_FALSE(complete(p, red.face, 2000).has_value());
}

TEST(CompleteTest, FallsBackToAlternatingProjections) {
  // Whole-cone face with a non-unique completion: least squares gives an
  // indefinite minimum-norm fill, Dykstra recovers a PSD one.
  const ObservationGraph g = path(3);
  const PartialMatrix p(g, project_E(SymMatrix{{1, 0.9, 0}, {0.9, 1, 0.9}, {0, 0.9, 1}}, g));
  const auto x = complete(p, FaceRep::whole(3));
  ASSERT_TRUE(x.has_value());
  EXPECT_GE(min_eigenvalue(*x), -1e-9);
  EXPECT_LE((project_E(*x, g) - p.values).norm(), 1e-8);
}

TEST(BoundaryTest, CycleFamily) {
  const double eps = boundary_epsilon(cycle_family, 0.0, 1.0, 1e-9);
  EXPECT_NEAR(eps, std::sqrt(2.0) - 1.0, 1e-6);
  EXPECT_THROW(boundary_epsilon(cycle_family, 0.5, 1.0), Error);
  EXPECT_THROW(boundary_epsilon(cycle_family, 0.0, 0.2), Error);
  const auto [lam, fill] = best_min_eigenvalue(cycle_family(std::sqrt(2.0) - 1.0));
  EXPECT_NEAR(lam, 0.0, 1e-9);
  EXPECT_NEAR(fill(0, 2), 0.0, 1e-6);
}

TEST(CompletionInvariants, ChordalFaceContainsTruthWithRankDimension) {
  std::mt19937 rng(31);
  for (int seed = 0; seed < 50; ++seed) {
    const Index n = 6 + seed % 7;
    const Index r = 1 + seed % 3;
    const ObservationGraph g = random_chordal(n, r, rng);
    const Matrix f = random_factor(n, r, rng);
    const SymMatrix x(Matrix(f * f.transpose()));
    const PartialMatrix p(g, project_E(x, g));
    const FaceRep face = combined_face(p, maximal_cliques(g));
    EXPECT_TRUE(face_contains(face, x, 1e-8)) << seed;
    EXPECT_EQ(face.dim(), r) << seed;
  }
}

TEST(CompletionInvariants, ChordalReducedProblemHasNoDiagCertificate) {
  std::mt19937 rng(37);
  for (int seed = 0; seed < 50; ++seed) {
    const Index n = 5 + seed % 6;
    const Index r = 1 + seed % 3;
    const ObservationGraph g = random_chordal(n, 1, rng);
    const Matrix f = random_factor(n, r, rng);
    const PartialMatrix p(g, project_E(SymMatrix(Matrix(f * f.transpose())), g));
    const FaceRep face = combined_face(p, maximal_cliques(g));
    const ConicProblem reduced = drop_dependent_constraints(completion_problem(p, face), 1e-9);
    EXPECT_FALSE(find_certificate_lp(reduced, Finder::Diag).has_value()) << seed;
  }
}

TEST(CompletionInvariants, CliqueOrderDoesNotMatter) {
  std::mt19937 rng(41);
  for (int seed = 0; seed < 10; ++seed) {
    const ObservationGraph g = random_chordal(9, 2, rng);
    const Matrix f = random_factor(9, 2, rng);
    const PartialMatrix p(g, project_E(SymMatrix(Matrix(f * f.transpose())), g));
    auto cliques = maximal_cliques(g);
    const FaceRep a = combined_face(p, cliques);
    std::shuffle(cliques.begin(), cliques.end(), rng);
    EXPECT_LE(face_distance(a, combined_face(p, cliques)), 1e-8);
  }
}

TEST(PartialIoTest, RoundTripAndErrors) {
  const PartialMatrix p = path_example();
  std::stringstream ss;
  write_partial(ss, p);
  const PartialMatrix q = read_partial(ss);
  EXPECT_EQ(q.values, p.values);
  EXPECT_EQ(q.graph.edges(), p.graph.edges());
  for (const char* bad : {"psdc 2\nn 2\n", "psdc 1\nn 2\n1 1 1\n", "psdc 1\nn 1\n1 1 x\n",
                          "psdc 1\nn 1\n1 1 1\n1 1 2\n", "psdc 1\nn 2\n2 1 1\n1 1 1\n2 2 1\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(read_partial(in), Error) << bad;
  }
  std::istringstream loose("  psdc   1\n\n n 1 \n 1\t1  2.5e0 \n");
  EXPECT_EQ(read_partial(loose).values(0), 2.5);
}
