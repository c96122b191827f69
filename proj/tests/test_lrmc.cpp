#include "facered/lrmc.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace facered;

namespace {

BipartiteObservations full(const Matrix& z, Index r) {
  std::vector<Observation> e;
  for (Index i = 0; i < z.rows(); ++i)
    for (Index j = 0; j < z.cols(); ++j) e.push_back({i, j, z(i, j)});
  return BipartiteObservations(z.rows(), z.cols(), r, e);
}

Matrix low_rank(Index m, Index n, Index r, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Matrix p(m, r), q(n, r);
  for (Index i = 0; i < p.size(); ++i) p.data()[i] = g(rng);
  for (Index i = 0; i < q.size(); ++i) q.data()[i] = g(rng);
  return p * q.transpose();
}

// Lift of the planted Z as [P; Q][P; Q]ᵀ with Z = P Qᵀ.
SymMatrix planted_lift(const Matrix& z) { return nuclear_lift(z); }

}  // namespace

TEST(Observations, Validation) {
  EXPECT_THROW(BipartiteObservations(2, 2, 1, {{0, 2, 1.0}}), Error);
  EXPECT_THROW(BipartiteObservations(2, 2, 1, {{0, 0, 1.0}, {0, 0, 2.0}}), Error);
  EXPECT_THROW(BipartiteObservations(2, 2, 0, {}), Error);
  BipartiteObservations o(2, 3, 1, {{1, 2, 4.0}, {1, 0, 3.0}});
  EXPECT_TRUE(o.observed(1, 2));
  EXPECT_FALSE(o.observed(0, 0));
  EXPECT_EQ(o.value(1, 0), 3.0);
  EXPECT_EQ(o.row_support(1), (std::vector<Index>{0, 2}));
}

TEST(FindBlocks, FullyObservedIsOneBlock) {
  std::mt19937 rng(1);
  const auto obs = full(low_rank(6, 8, 2, rng), 2);
  const auto blocks = find_blocks(obs, 3, 3, -1);
  ASSERT_EQ(blocks.size(), 1u);
  EXPECT_EQ(blocks[0].rows.size(), 6u);
  EXPECT_EQ(blocks[0].cols.size(), 8u);
}

TEST(FindBlocks, CheckerboardHasNone) {
  std::vector<Observation> e;
  for (Index i = 0; i < 8; ++i)
    for (Index j = 0; j < 8; ++j)
      if ((i + j) % 2 == 0) e.push_back({i, j, 1.0});
  // Rows of equal parity share 4 columns, so 5×5 blocks do not exist.
  BipartiteObservations obs(8, 8, 4, e);
  EXPECT_TRUE(find_blocks(obs, 5, 5, -1).empty());
}

TEST(FindBlocks, PlantedBlockFound) {
  std::mt19937 rng(2);
  const Matrix z = low_rank(12, 12, 4, rng);
  std::vector<Observation> e;
  for (Index i = 0; i < 12; ++i)
    for (Index j = 0; j < 12; ++j)
      if ((i < 6 && j < 6) || i == j) e.push_back({i, j, z(i, j)});
  BipartiteObservations obs(12, 12, 4, e);
  const auto blocks = find_blocks(obs, 5, 5, -1);
  ASSERT_FALSE(blocks.empty());
  Block planted{{0, 1, 2, 3, 4, 5}, {0, 1, 2, 3, 4, 5}};
  EXPECT_NE(std::find(blocks.begin(), blocks.end(), planted), blocks.end());
  for (const Block& b : blocks) {
    for (Index i : b.rows)
      for (Index j : b.cols) EXPECT_TRUE(obs.observed(i, j));
  }
}

TEST(BlockExposing, RankOneByHand) {
  Matrix z = Matrix::Ones(2, 2);
  const auto obs = full(z, 1);
  const SymMatrix w = block_exposing(obs, Block{{0, 1}, {0, 1}});
  Matrix expected = Matrix::Zero(4, 4);
  expected.topLeftCorner(2, 2) << 0.5, -0.5, -0.5, 0.5;
  expected.bottomRightCorner(2, 2) << 0.5, -0.5, -0.5, 0.5;
  EXPECT_LT((w.mat() - expected).norm(), 1e-14);
}

TEST(BlockExposing, PreconditionsAndRank) {
  std::mt19937 rng(3);
  const Matrix z = low_rank(7, 9, 4, rng);
  const auto obs = full(z, 4);
  EXPECT_THROW(block_exposing(obs, Block{{0, 1, 2, 3}, {0, 1, 2, 3, 4}}), Error);
  Block b{{0, 1, 2, 3, 4, 5, 6}, {0, 1, 2, 3, 4, 5}};
  const SymMatrix w = block_exposing(obs, b);
  EXPECT_EQ(range_basis(w, 1e-9).cols(), (7 - 4) + (6 - 4));
  EXPECT_GE(min_eigenvalue(w), -1e-12);
  EXPECT_LE(std::abs(inner(w, planted_lift(z))), 1e-8 * planted_lift(z).mat().norm());

  const auto wrong = full(z, 3);
  try {
    block_exposing(wrong, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RankMismatch);
  }
}

TEST(LrmcFace, GlobalBlockAndNoBlocks) {
  std::mt19937 rng(4);
  const Matrix z = low_rank(6, 7, 2, rng);
  const auto obs = full(z, 2);
  const SideBases s = lrmc_side_bases(obs, {Block{{0, 1, 2, 3, 4, 5}, {0, 1, 2, 3, 4, 5, 6}}});
  EXPECT_EQ(s.rows.cols(), 2);
  EXPECT_EQ(s.cols.cols(), 2);
  const FaceRep face = lrmc_face(obs, {});
  EXPECT_EQ(face.dim(), 13);
  EXPECT_EQ(face.ambient_n(), 13);
}

TEST(LrmcFace, PlantedTwentyByThirty) {
  const PlantedLrmc p = lrmc_generate(20, 30, 2, 0.6, 5);
  const auto blocks = find_blocks(p.obs, 3, 3, 200);
  const FaceRep face = lrmc_face(p.obs, blocks);
  EXPECT_EQ(face.dim(), 4);  // r on each side
  // The planted lift lies in the face.
  const SymMatrix y = nuclear_lift(p.truth);
  EXPECT_TRUE(face_contains(face, y, 1e-8));
}

TEST(LrmcRecover, FullyObservedExact) {
  std::mt19937 rng(6);
  const Matrix z = low_rank(8, 10, 3, rng);
  const LrmcResult res = lrmc_recover(full(z, 3));
  ASSERT_TRUE(res.z);
  EXPECT_LT((*res.z - z).norm(), 1e-10 * z.norm());
  EXPECT_EQ(res.rank, 3);
}

TEST(LrmcRecover, PlantedDeskScale) {
  const PlantedLrmc p = lrmc_generate(100, 200, 4, 0.36, 1);
  const LrmcResult res = lrmc_recover(p.obs);
  ASSERT_TRUE(res.z) << res.message;
  EXPECT_EQ(res.rank, 4);
  EXPECT_LT(heldout_residual(p.obs, *res.z, p.truth), 1e-8);
}

TEST(LrmcRecover, InsufficientBlocks) {
  const PlantedLrmc p = lrmc_generate(30, 30, 4, 0.15, 2);
  const LrmcResult res = lrmc_recover(p.obs);
  EXPECT_FALSE(res.z);
  ASSERT_TRUE(res.diagnostic);
  EXPECT_EQ(*res.diagnostic, ErrorKind::FaceTooBig);
}

TEST(LrmcRecover, PlantedSeedsWithRankFace) {
  std::mt19937 rng(7);
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Index m = std::uniform_int_distribution<Index>(30, 80)(rng);
    const Index n = std::uniform_int_distribution<Index>(30, 80)(rng);
    const Index r = std::uniform_int_distribution<Index>(1, 5)(rng);
    const double density = std::uniform_real_distribution<double>(0.3, 0.6)(rng);
    const PlantedLrmc p = lrmc_generate(m, n, r, density, seed);
    const LrmcResult res = lrmc_recover(p.obs);
    if (res.row_dim != r || res.col_dim != r) continue;
    ASSERT_TRUE(res.z) << "seed " << seed;
    EXPECT_LE(heldout_residual(p.obs, *res.z, p.truth), 1e-6) << "seed " << seed;
    ++recovered;
  }
  EXPECT_GE(recovered, 25);
}

TEST(NuclearNorm, Examples) {
  EXPECT_NEAR(nuclear_norm(Matrix::Identity(3, 3)), 3.0, 1e-14);
  EXPECT_EQ(nuclear_norm(Matrix::Zero(3, 2)), 0.0);
  const Vector u = (Vector(3) << 1, 2, 2).finished();
  const Vector v = (Vector(2) << 3, 4).finished();
  EXPECT_NEAR(nuclear_norm(u * v.transpose()), 15.0, 1e-12);
}

TEST(NuclearNorm, HalfTraceOfLift) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix z = low_rank(9, 6, 1 + trial % 4, rng);
    const SymMatrix y = nuclear_lift(z);
    EXPECT_NEAR(nuclear_norm(z), 0.5 * y.mat().trace(), 1e-9);
    EXPECT_LT((y.mat().topRightCorner(9, 6) - z).norm(), 1e-10);
    EXPECT_GE(min_eigenvalue(y), -1e-10);
  }
}

TEST(LrmcFormat, RoundTripAndErrors) {
  const PlantedLrmc p = lrmc_generate(5, 6, 2, 0.5, 9);
  std::stringstream ss;
  write_lrmc(ss, p.obs);
  const BipartiteObservations back = read_lrmc(ss);
  EXPECT_EQ(back.entries(), p.obs.entries());
  EXPECT_EQ(back.r(), 2);
  std::istringstream bad("lrmc 1\nm 2 n 2 r 1\n3 1 1.0\n");
  EXPECT_THROW(read_lrmc(bad), Error);
  std::istringstream header("lrmc 1\nm 2 n 2\n");
  EXPECT_THROW(read_lrmc(header), Error);
  std::stringstream csv;
  write_matrix_csv(csv, (Matrix(2, 2) << 1, 0.5, -2, 0).finished());
  EXPECT_EQ(csv.str(), "1,0.5\n-2,0\n");
}
