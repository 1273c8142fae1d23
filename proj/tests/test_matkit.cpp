#include <gtest/gtest.h>

#include <momentforge/matkit.hpp>

#include "oracles.hpp"

using namespace momentforge;

namespace {

CMatrix m2(cplx a, cplx b, cplx c, cplx d) {
  CMatrix A(2, 2);
  A << a, b, c, d;
  return A;
}

const cplx I(0.0, 1.0);

}  // namespace

TEST(Matkit, HermitianExamples) {
  EXPECT_TRUE(is_hermitian(oracle::scalar(2.0)));
  EXPECT_TRUE(is_hermitian(m2(0.0, I, -I, 0.0)));
  EXPECT_FALSE(is_hermitian(m2(0.0, 1.0, 0.0, 0.0)));
  EXPECT_THROW(is_hermitian(CMatrix::Zero(2, 3)), Error);
}

TEST(Matkit, Definiteness) {
  const CMatrix d = m2(1.0, 0.0, 0.0, 0.0);
  EXPECT_TRUE(is_nonneg_definite(d));
  EXPECT_FALSE(is_pos_definite(d));
  EXPECT_TRUE(is_pos_definite(m2(2.0, 3.0, 3.0, 5.0)));
  EXPECT_FALSE(is_nonneg_definite(m2(1.0, 2.0, 2.0, 1.0)));
  try {
    is_nonneg_definite(m2(0.0, 1.0, 0.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::structure);
  }
}

TEST(Matkit, PositiveImpliesNonnegative) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index q = 1 + t % 4;
    const CMatrix A = oracle::random_hermitian(q, rng);
    if (is_pos_definite(A)) EXPECT_TRUE(is_nonneg_definite(A));
  }
}

TEST(Matkit, MoorePenroseExamples) {
  const CMatrix Z = CMatrix::Zero(2, 3);
  const CMatrix G = moore_penrose(Z);
  EXPECT_EQ(G.rows(), 3);
  EXPECT_EQ(G.cols(), 2);
  EXPECT_EQ(max_abs(G), 0.0);
  EXPECT_LT(rel_residual(moore_penrose(m2(2.0, 0.0, 0.0, 0.0)), m2(0.5, 0.0, 0.0, 0.0)), 1e-15);
}

TEST(Matkit, PenroseEquations) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const CMatrix A = oracle::random_matrix(3, 2, rng);
    const CMatrix G = moore_penrose(A);
    EXPECT_LT(rel_residual(A * G * A, A), 1e-10);
    EXPECT_LT(rel_residual(G * A * G, G), 1e-10);
    EXPECT_LT(rel_residual((A * G).adjoint(), A * G), 1e-10);
    EXPECT_LT(rel_residual((G * A).adjoint(), G * A), 1e-10);
    EXPECT_LT(rel_residual(moore_penrose(G), A), 1e-8);
  }
}

TEST(Matkit, PseudoinverseOfInvertibleIsInverse) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const CMatrix A = oracle::random_matrix(4, 4, rng);
    if (condition_estimate(A) > 1e8) continue;
    EXPECT_LT(rel_residual(moore_penrose(A), inverse(A)), 1e-8);
    EXPECT_LT(rel_residual(pseudo_solve(A, A), CMatrix::Identity(4, 4)), 1e-8);
  }
}

TEST(Matkit, RankDeficientPseudoSolve) {
  // rank one, consistent right-hand side
  CMatrix v(3, 1);
  v << 1.0, 2.0, I;
  const CMatrix A = v * v.adjoint();
  const CMatrix B = A * CMatrix::Ones(3, 2);
  EXPECT_LT(rel_residual(pseudo_solve(A, B), moore_penrose(A) * B), 1e-12);
}

TEST(Matkit, SingularSolveIsConditioningError) {
  try {
    inverse(m2(1.0, 1.0, 1.0, 1.0), "H_1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::conditioning);
    EXPECT_NE(std::string(e.what()).find("H_1"), std::string::npos);
  }
}

TEST(Matkit, TolerancePolicyValidation) {
  TolerancePolicy t;
  EXPECT_NO_THROW(t.validate());
  t.psd_floor = 0.0;
  EXPECT_THROW(t.validate(), Error);
}
