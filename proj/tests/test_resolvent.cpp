#include <gtest/gtest.h>

#include <momentforge/resolvent.hpp>

#include "oracles.hpp"

using namespace momentforge;
using oracle::scalar;

namespace {

const cplx I(0.0, 1.0);

CMatrix m2(cplx a, cplx b, cplx c, cplx d) {
  CMatrix A(2, 2);
  A << a, b, c, d;
  return A;
}

std::vector<cplx> random_samples(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.2, 3.0);
  std::bernoulli_distribution flip;
  std::vector<cplx> z;
  for (int i = 0; i < count; ++i) z.emplace_back(re(rng), flip(rng) ? im(rng) : -im(rng));
  return z;
}

}  // namespace

TEST(Resolvent, OrderZero) {
  const auto s = random_spd_sequence(2, 0, 3);
  const cplx z(0.7, -0.4);
  CMatrix expect = CMatrix::Identity(4, 4);
  expect.bottomLeftCorner(2, 2) = -z * s[0].inverse();
  EXPECT_LT(rel_residual(resolvent_direct(s, 0)(z), expect), 1e-12);
  const auto chain = elementary_factors(ds_forward(s), 0);
  ASSERT_EQ(chain.size(), 1u);
  EXPECT_EQ(chain[0].kind, Factor::mass);
  EXPECT_LT(rel_residual(resolvent_from_polys(omp_quadruple(s, 1), 0, z), expect), 1e-12);
}

TEST(Resolvent, FactorialOrderOne) {
  const auto s = oracle::factorial(5);
  const auto quad = omp_quadruple(s, 3);
  const auto chain = elementary_factors(ds_forward(s), 1);
  for (cplx z : {cplx(2.0), I, cplx(-1.5, 0.3)}) {
    const CMatrix expect = m2(1.0, 1.0, -z, 1.0 - z);
    EXPECT_LT(rel_residual(resolvent_direct(s, 1)(z), expect), 1e-12);
    EXPECT_LT(rel_residual(resolvent_from_polys(quad, 1, z), expect), 1e-12);
    EXPECT_LT(rel_residual(factor_product(chain, z), expect), 1e-12);
  }
  // explicit 2x2 product at z = 2
  EXPECT_LT(rel_residual(m2(1, 0, -2, 1) * m2(1, 1, 0, 1), m2(1, 1, -2, -1)), 1e-15);
  EXPECT_LT(rel_residual(factor_product(chain, 2.0), m2(1, 1, -2, -1)), 1e-12);
}

TEST(Resolvent, ValueAtZero) {
  // At z = 0 every mass factor is I, so U_m(0) = [[I, sum of lengths], [0, I]].
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = random_spd_sequence(2, 7, seed);
    const auto ds = ds_forward(s);
    for (std::size_t m = 0; m <= 7; ++m) {
      const auto U = resolvent_direct(s, m);
      CMatrix expect = CMatrix::Identity(4, 4);
      for (std::size_t k = 0; 2 * k + 1 <= m; ++k) expect.topRightCorner(2, 2) += ds.lengths[k];
      EXPECT_LT(rel_residual(U(0.0), expect), 1e-10);
      EXPECT_LE(U.poly.degree(1e-13), static_cast<int>((m + 1) / 2 + 1));
      EXPECT_NEAR(std::abs(U(0.0).determinant()), 1.0, 1e-12);
    }
  }
}

TEST(Resolvent, ThreeWayAgreement) {
  std::mt19937_64 rng(99);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Eigen::Index q = 1 + seed % 3;
    const auto s = random_spd_sequence(q, 8, seed);
    const auto z = random_samples(rng, 20);
    for (std::size_t m = 0; m <= 8; ++m) EXPECT_LT(three_way_check(s, m, z).max(), 1e-8) << seed << " " << m;
  }
}

TEST(Resolvent, ConjugationFactors) {
  const auto s = oracle::factorial(5);
  const auto cf = conjugation_factors(omp_quadruple(s, 2), 0);
  EXPECT_LT(rel_residual(cf.Q(2.0), m2(0, 1, -2, 0)), 1e-15);
  EXPECT_LT(rel_residual(cf.P(), CMatrix::Identity(2, 2)), 1e-15);
  const auto r = random_spd_sequence(2, 6, 1);
  for (std::size_t n = 0; n <= 3; ++n) {
    const auto c = conjugation_factors(r, n, 0);
    EXPECT_GT(std::abs(c.Q(cplx(0.5, 0.5)).determinant()), 0.0);
  }
  EXPECT_NEAR(std::abs(conjugation_factors(r, 1, 2).Q(0.0).determinant()), 0.0, 1e-14);
}

TEST(Resolvent, Intertwining) {
  const std::vector<cplx> zi{I, cplx(-1, 1), 2.0};
  const auto f = intertwine_check(oracle::factorial(7), 1, 0, zi);
  EXPECT_LT(f.max(), 1e-10);
  EXPECT_TRUE(f.has("lengths by even conjugation"));
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto s = random_spd_sequence(2, 10, seed);
    const auto z = random_samples(rng, 4);
    for (std::size_t k = 0; k <= 4; ++k) {
      const auto r = intertwine_check(s, k, 4, z);
      EXPECT_LT(r.max(), 1e-8) << seed << " " << k;
    }
  }
}

TEST(Resolvent, TransformedResolvent) {
  const auto s = oracle::factorial(5);
  EXPECT_LT(rel_residual(transformed_resolvent(s, 3, 0)(I), resolvent_direct(s, 3)(I)), 1e-15);
  EXPECT_LT(rel_residual(transformed_resolvent(s, 1, 1)(I), m2(1, 0, -I, 1)), 1e-14);
  EXPECT_EQ(transformed_resolvent(s, 4, 4).m, 0u);
  EXPECT_THROW(transformed_resolvent(s, 2, 3), Error);
}

TEST(Resolvent, SplittingFactorial) {
  const auto s = oracle::factorial(1);
  const std::vector<cplx> zi{I};
  const auto r = splitting_check(s, 1, 0, zi);
  EXPECT_LT(r.max(), 1e-12);
  // both sides of the split at ell = 0 equal U_1(i)
  const auto lad = ConjugationFactors{scalar(1.0), scalar(1.0)};
  const CMatrix Q = lad.Q(I);
  const CMatrix rhs = resolvent_direct(s, 0)(I) * Q * transformed_resolvent(s, 1, 1)(I) * Q.inverse();
  EXPECT_LT(rel_residual(rhs, m2(1, 1, -I, 1.0 - I)), 1e-14);
  EXPECT_THROW(splitting_check(s, 1, 1, zi), Error);
}

TEST(Resolvent, SplittingRandom) {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto s = random_spd_sequence(2, 6, seed);
    const auto z = random_samples(rng, 5);
    for (std::size_t m = 1; m <= 6; ++m)
      for (std::size_t ell = 0; ell < m; ++ell) EXPECT_LT(splitting_check(s, m, ell, z).max(), 1e-8) << seed;
  }
}
