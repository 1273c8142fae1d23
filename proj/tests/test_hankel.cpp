#include <gtest/gtest.h>

#include <momentforge/hankel.hpp>
#include <momentforge/parametrize.hpp>

#include "oracles.hpp"

using namespace momentforge;
using oracle::scalar;

namespace {

MomentSequence two_atoms(std::size_t m) {  // delta_1 + delta_2
  std::vector<cplx> v;
  for (std::size_t j = 0; j <= m; ++j) v.emplace_back(1.0 + std::pow(2.0, static_cast<double>(j)));
  return MomentSequence::scalar(v);
}

}  // namespace

TEST(Hankel, BlockIndexing) {
  const auto s = oracle::factorial(3);
  CMatrix H1(2, 2), K1(2, 2);
  H1 << 1.0, 1.0, 1.0, 2.0;
  K1 << 1.0, 2.0, 2.0, 6.0;
  EXPECT_EQ(max_abs(build_H(s, 1) - H1), 0.0);
  EXPECT_EQ(max_abs(build_K(s, 1) - K1), 0.0);
  EXPECT_EQ(max_abs(build_H(s, 0) - s[0]), 0.0);
  EXPECT_EQ(max_abs(build_K(s, 0) - s[1]), 0.0);
  EXPECT_THROW(build_H(s, 2), Error);
  EXPECT_THROW(build_K(oracle::factorial(2), 1), Error);
}

TEST(Hankel, YZBlocks) {
  const auto s = oracle::factorial(3);
  EXPECT_EQ(max_abs(y_block(s, 1, 1) - s[1]), 0.0);
  CMatrix z(1, 2);
  z << 2.0, 6.0;
  EXPECT_EQ(max_abs(z_block(s, 2, 3) - z), 0.0);
  const MomentSequence id2({CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)});
  const CMatrix y = y_block(id2, 0, 1);
  EXPECT_EQ(y.rows(), 4);
  EXPECT_EQ(y.cols(), 2);
  EXPECT_EQ(max_abs(y.topRows(2) - CMatrix::Identity(2, 2)), 0.0);
  EXPECT_EQ(max_abs(y.bottomRows(2) - CMatrix::Identity(2, 2)), 0.0);
  EXPECT_THROW(y_block(s, 2, 1), Error);
  EXPECT_THROW(z_block(s, 0, 4), Error);
}

TEST(Hankel, SchurComplementsFactorial) {
  const auto s = oracle::factorial(5);
  const double L[] = {1, 1, 4}, La[] = {1, 2, 12};
  for (std::size_t n = 0; n < 3; ++n) {
    EXPECT_LT(rel_residual(schur_L(s, n), scalar(L[n])), 1e-12) << n;
    EXPECT_LT(rel_residual(schur_Lambda(s, n), scalar(La[n])), 1e-12) << n;
  }
  EXPECT_THROW(schur_Lambda(oracle::factorial(4), 2), Error);
}

TEST(Hankel, SingleAtomSchurVanishes) {
  const auto s = MomentSequence::scalar({1.0, 1.0, 1.0});
  EXPECT_LT(max_abs(schur_L(s, 1)), 1e-14);
}

TEST(Hankel, SchurMatchesExplicitBlockInversion) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::Index q = 1 + seed % 3;
    const auto s = random_spd_sequence(q, 7, seed);
    for (std::size_t n = 1; 2 * n <= 7; ++n) {
      EXPECT_LT(rel_residual(schur_L(s, n), oracle::schur_complement(build_H(s, n), n * q)), 1e-8);
      if (2 * n + 1 <= 7)
        EXPECT_LT(rel_residual(schur_Lambda(s, n), oracle::schur_complement(build_K(s, n), n * q)), 1e-8);
    }
  }
}

TEST(Hankel, ClassifyFactorial) {
  const auto c = classify_by_definition(oracle::factorial(5));
  EXPECT_TRUE(c.in_Kg);
  EXPECT_TRUE(c.in_Kgge);
  EXPECT_TRUE(c.in_Kgg);
  EXPECT_FALSE(c.completely_degenerate.has_value());
}

TEST(Hankel, ClassifyTwoAtoms) {
  const auto c = classify_by_definition(two_atoms(4));
  EXPECT_TRUE(c.in_Kgg);
  EXPECT_TRUE(c.in_Kgge);
  EXPECT_FALSE(c.in_Kg);
  ASSERT_TRUE(c.completely_degenerate.has_value());
  EXPECT_EQ(*c.completely_degenerate, 4u);
}

TEST(Hankel, ClassifyZeroSequence) {
  const MomentSequence z(std::vector<CMatrix>(4, CMatrix::Zero(2, 2)));
  const auto c = classify_by_definition(z);
  EXPECT_TRUE(c.in_Kgg);
  EXPECT_FALSE(c.in_Kg);
  ASSERT_TRUE(c.completely_degenerate.has_value());
  EXPECT_EQ(*c.completely_degenerate, 0u);
}

TEST(Hankel, ClassifyRejectsNonHermitian) {
  CMatrix a(2, 2);
  a << 1.0, 1.0, 0.0, 1.0;
  try {
    classify_by_definition(MomentSequence({a}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::structure);
  }
}

TEST(Hankel, IndefiniteIsNotNonnegative) {
  const auto c = classify_by_definition(MomentSequence::scalar({1.0, 2.0, 1.0}));
  EXPECT_FALSE(c.in_Kgg);
  EXPECT_FALSE(c.in_Kg);
}

TEST(Hankel, RandomSequencesArePositive) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const auto s = random_spd_sequence(1 + seed % 3, seed % 11, seed);
    EXPECT_TRUE(classify_by_definition(s).in_Kg) << seed;
  }
}

TEST(Hankel, AtomicMeasureMomentsAreNonnegative) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index q = 2;
    std::vector<CMatrix> s(7, CMatrix::Zero(q, q));
    for (int a = 0; a < 2; ++a) {  // fewer atoms than needed for definiteness
      const double x = u(rng);
      const CMatrix b = oracle::random_matrix(q, 1, rng);
      for (std::size_t j = 0; j < s.size(); ++j) s[j] += std::pow(x, static_cast<double>(j)) * b * b.adjoint();
    }
    EXPECT_TRUE(classify_by_definition(MomentSequence(s)).in_Kgg);
  }
}
