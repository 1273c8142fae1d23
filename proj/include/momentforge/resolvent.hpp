#ifndef MOMENTFORGE_RESOLVENT_HPP
#define MOMENTFORGE_RESOLVENT_HPP

#include <span>
#include <vector>

#include "polyomp.hpp"

namespace momentforge {

/// 2q x 2q matrix polynomial U_m with corner blocks A, B, C, D.
struct ResolventMatrix {
  std::size_t m = 0;
  Eigen::Index q = 0;
  MatrixPoly poly;

  CMatrix operator()(cplx z) const { return poly(z); }
  MatrixPoly A() const { return block_of(poly, 0, 0, q); }
  MatrixPoly B() const { return block_of(poly, 0, 1, q); }
  MatrixPoly C() const { return block_of(poly, 1, 0, q); }
  MatrixPoly D() const { return block_of(poly, 1, 1, q); }
};

inline ResolventMatrix resolvent_direct(const MomentSequence& seq, std::size_t m) {
  require_order(seq, m, "resolvent");
  const std::size_t n = m / 2;
  auto [alpha, gamma] = alpha_gamma(seq, n);
  auto [beta, delta] = beta_delta(seq, m % 2 == 0 ? n : n + 1);
  return {m, seq.q(), block2x2(alpha, beta, gamma, delta)};
}

struct Factor {
  enum Kind { mass, length } kind;
  std::size_t k;
  CMatrix param;

  // [[I, 0], [-z M, I]] or [[I, L], [0, I]]
  CMatrix operator()(cplx z) const {
    const Eigen::Index q = param.rows();
    CMatrix F = identity(2 * q);
    if (kind == mass) F.bottomLeftCorner(q, q) = -z * param;
    else F.topRightCorner(q, q) = param;
    return F;
  }
};

using FactorChain = std::vector<Factor>;

/// M_0, L_0, M_1, L_1, ... with m + 1 factors.
inline FactorChain elementary_factors(const DSParams& ds, std::size_t m) {
  ds.validate();
  if (m > ds.order()) throw Error(ErrorKind::length, "not enough DS parameters for the factor chain");
  FactorChain chain;
  for (std::size_t i = 0; i <= m; ++i) {
    const std::size_t k = i / 2;
    if (i % 2 == 0) chain.push_back({Factor::mass, k, ds.masses[k]});
    else chain.push_back({Factor::length, k, ds.lengths[k]});
  }
  return chain;
}

inline CMatrix factor_product(const FactorChain& chain, cplx z) {
  if (chain.empty()) throw Error(ErrorKind::length, "empty factor chain");
  CMatrix U = chain.front()(z);
  for (std::size_t i = 1; i < chain.size(); ++i) U = U * chain[i](z);
  return U;
}

inline CMatrix resolvent_from_polys(const OmpQuadruple& quad, std::size_t m, cplx z) {
  const std::size_t n = m / 2;
  const std::size_t h = m % 2 == 0 ? n : n + 1;
  if (n >= quad.qK.size() || h >= quad.pH.size()) throw Error(ErrorKind::length, "polynomials missing for order");
  const Eigen::Index q = quad.pH[0].rows();
  CMatrix U(2 * q, 2 * q);
  U << quad.qK[n](z), -quad.qH[h](z), -z * quad.pK[n](z), quad.pH[h](z);
  CMatrix D = zeros(2 * q, 2 * q);
  D.topLeftCorner(q, q) = inverse(quad.qK[n](0.0), "q_K,n(0)");
  D.bottomRightCorner(q, q) = inverse(quad.pH[h](0.0), "p_H,n(0)");
  return U * D;
}

/// P~_n = diag(p_H,n(0)^{-*}, p_H,n(0)) and Q~_n(z) = [[0, q_K,n(0)], [-z q_K,n(0)^{-*}, 0]].
struct ConjugationFactors {
  CMatrix pH0, qK0;

  CMatrix P() const {
    const Eigen::Index q = pH0.rows();
    CMatrix out = zeros(2 * q, 2 * q);
    out.topLeftCorner(q, q) = inverse(pH0, "p_H,n(0)").adjoint();
    out.bottomRightCorner(q, q) = pH0;
    return out;
  }

  CMatrix Q(cplx z) const {
    const Eigen::Index q = qK0.rows();
    CMatrix out = zeros(2 * q, 2 * q);
    out.topRightCorner(q, q) = qK0;
    out.bottomLeftCorner(q, q) = -z * inverse(qK0, "q_K,n(0)").adjoint();
    return out;
  }
};

inline ConjugationFactors conjugation_factors(const OmpQuadruple& quad, std::size_t n) {
  if (n >= quad.pH.size() || n >= quad.qK.size()) throw Error(ErrorKind::length, "polynomials missing for index");
  return {quad.pH[n](0.0), quad.qK[n](0.0)};
}

// factors built from the ell-th transform
inline ConjugationFactors conjugation_factors(const MomentSequence& seq, std::size_t n, std::size_t ell,
                                              const TolerancePolicy& tol = {}) {
  return conjugation_factors(omp_quadruple(transformK(seq, ell, tol), n), n);
}

inline ResolventMatrix transformed_resolvent(const MomentSequence& seq, std::size_t m, std::size_t ell,
                                             const TolerancePolicy& tol = {}) {
  if (ell > m) throw Error(ErrorKind::length, "transform index exceeds resolvent order");
  require_order(seq, m, "transformed resolvent");
  return resolvent_direct(transformK(seq, ell, tol), m - ell);
}

/// Direct, factored and polynomial forms of U_m at each sample.
inline Residuals three_way_check(const MomentSequence& seq, std::size_t m, std::span<const cplx> z_samples) {
  const ResolventMatrix U = resolvent_direct(seq, m);
  const FactorChain chain = elementary_factors(ds_forward(seq.truncated(m)), m);
  const OmpQuadruple quad = omp_quadruple(seq.truncated(m), m / 2 + 1);
  Residuals r;
  for (cplx z : z_samples) {
    const CMatrix u = U(z);
    r.add("factor chain vs block formulas", rel_residual(factor_product(chain, z), u));
    r.add("polynomial form vs block formulas", rel_residual(resolvent_from_polys(quad, m, z), u));
  }
  return r;
}

namespace detail {

// DS parameters of every transform of the sequence, index ell = 0..m
struct TransformLadder {
  std::vector<MomentSequence> seqs;
  std::vector<DSParams> ds;

  TransformLadder(const MomentSequence& seq, const TolerancePolicy& tol) {
    seqs.push_back(seq);
    for (std::size_t l = 1; l <= seq.order(); ++l) seqs.push_back(transform1(seqs.back(), tol));
    for (const auto& s : seqs) ds.push_back(ds_forward(s));
  }

  bool has_length(std::size_t l, std::size_t k) const { return l < ds.size() && k < ds[l].lengths.size(); }
  bool has_mass(std::size_t l, std::size_t k) const { return l < ds.size() && k < ds[l].masses.size(); }
  CMatrix Lt(std::size_t l, std::size_t k, cplx z) const { return Factor{Factor::length, k, ds[l].lengths[k]}(z); }
  CMatrix Mt(std::size_t l, std::size_t k, cplx z) const { return Factor{Factor::mass, k, ds[l].masses[k]}(z); }

  // Q~_0 of the l-th transform
  CMatrix Q0(std::size_t l, cplx z) const { return ConjugationFactors{seqs[l][0], seqs[l][0]}.Q(z); }

  // product over l = 0..n of Q~_0^{(l)}
  CMatrix Qchain(std::size_t n, cplx z) const {
    CMatrix Q = Q0(0, z);
    for (std::size_t l = 1; l <= n; ++l) Q = Q * Q0(l, z);
    return Q;
  }
};

}  // namespace detail

/// Conjugation relations between the elementary factors of a sequence and of its transforms.
inline Residuals intertwine_check(const MomentSequence& seq, std::size_t k, std::size_t n_max,
                                  std::span<const cplx> z_samples, const TolerancePolicy& tol = {}) {
  const detail::TransformLadder lad(seq, tol);
  const OmpQuadruple quad = omp_quadruple(seq, seq.order());
  Residuals r;
  for (cplx z : z_samples) {
    for (std::size_t mm = 0; mm <= std::min(k, n_max); ++mm) {
      if (mm >= quad.pH.size() || mm >= quad.qK.size()) break;
      const ConjugationFactors cf = conjugation_factors(quad, mm);
      const CMatrix P = cf.P(), Pinv = inverse(P), Q = cf.Q(z), Qinv = inverse(Q);
      const std::size_t j = k - mm;
      if (lad.has_length(0, k) && lad.has_length(2 * mm, j))
        r.add("lengths by even conjugation", rel_residual(lad.Lt(0, k, z), P * lad.Lt(2 * mm, j, z) * Pinv));
      if (lad.has_length(0, k) && lad.has_mass(2 * mm + 1, j))
        r.add("lengths by odd conjugation", rel_residual(lad.Lt(0, k, z), Q * lad.Mt(2 * mm + 1, j, z) * Qinv));
      if (lad.has_mass(0, k) && lad.has_mass(2 * mm, j))
        r.add("masses by even conjugation", rel_residual(lad.Mt(0, k, z), P * lad.Mt(2 * mm, j, z) * Pinv));
      if (lad.has_mass(0, k + 1) && lad.has_length(2 * mm + 1, j))
        r.add("next mass by odd conjugation", rel_residual(lad.Mt(0, k + 1, z), Q * lad.Lt(2 * mm + 1, j, z) * Qinv));
    }
    for (std::size_t l = 0; l <= n_max && l + 1 < lad.ds.size(); ++l) {
      const CMatrix Q = lad.Q0(l, z);
      if (lad.has_length(l, k) && lad.has_mass(l + 1, k))
        r.add("length-mass swap", rel_residual(lad.Lt(l, k, z) * Q, Q * lad.Mt(l + 1, k, z)));
      if (lad.has_mass(l, k + 1) && lad.has_length(l + 1, k))
        r.add("mass-length swap", rel_residual(lad.Mt(l, k + 1, z) * Q, Q * lad.Lt(l + 1, k, z)));
    }
    for (std::size_t n = 0; n <= n_max; ++n) {
      if (2 * n + 1 < lad.ds.size()) {
        const CMatrix Q = lad.Qchain(2 * n, z);
        if (lad.has_length(2 * n + 1, k) && lad.has_mass(0, k + n + 1))
          r.add("chain: odd transform lengths", rel_residual(Q * lad.Lt(2 * n + 1, k, z), lad.Mt(0, k + n + 1, z) * Q));
        if (lad.has_mass(2 * n + 1, k) && lad.has_length(0, k + n))
          r.add("chain: odd transform masses", rel_residual(Q * lad.Mt(2 * n + 1, k, z), lad.Lt(0, k + n, z) * Q));
      }
      if (2 * n + 2 < lad.ds.size()) {
        const CMatrix Q = lad.Qchain(2 * n + 1, z);
        if (lad.has_length(2 * n + 2, k) && lad.has_length(0, k + n + 1))
          r.add("chain: even transform lengths", rel_residual(Q * lad.Lt(2 * n + 2, k, z), lad.Lt(0, k + n + 1, z) * Q));
        if (lad.has_mass(2 * n + 2, k) && lad.has_mass(0, k + n + 1))
          r.add("chain: even transform masses", rel_residual(Q * lad.Mt(2 * n + 2, k, z), lad.Mt(0, k + n + 1, z) * Q));
      }
    }
  }
  return r;
}

/// Splitting of U_m through the resolvents of transformed sequences.
inline Residuals splitting_check(const MomentSequence& seq, std::size_t m, std::size_t ell,
                                 std::span<const cplx> z_samples, const TolerancePolicy& tol = {}) {
  require_order(seq, m, "splitting");
  if (m == 0 || ell + 1 > m) throw Error(ErrorKind::length, "split point must satisfy ell <= m - 1");
  const MomentSequence s = seq.truncated(m);
  const detail::TransformLadder lad(s, tol);
  std::vector<ResolventMatrix> U;  // U^{[m, l]}
  for (std::size_t l = 0; l <= m; ++l) U.push_back(resolvent_direct(lad.seqs[l], m - l));
  const ResolventMatrix Uell = resolvent_direct(s, ell);
  Residuals r;
  for (cplx z : z_samples) {
    if (z == 0.0) throw Error(ErrorKind::domain, "splitting identities need z != 0");
    const CMatrix Q0 = lad.Q0(0, z), M0 = lad.Mt(0, 0, z);
    r.add("one-step split of U", rel_residual(U[1](z), solve(M0 * Q0, U[0](z) * Q0)));

    const CMatrix Ql = lad.Q0(ell, z);
    r.add("split at transform index", rel_residual(U[ell](z), solve_right(lad.Mt(ell, 0, z) * Ql * U[ell + 1](z), Ql)));

    if (m >= 2) {
      const CMatrix QQ = Q0 * lad.Q0(1, z);
      r.add("two-step split of U",
            rel_residual(U[0](z), solve_right(M0 * lad.Lt(0, 0, z) * QQ * U[2](z), QQ)));
    }

    CMatrix prod = identity(2 * s.q());
    for (std::size_t l = 0; l <= m; ++l) prod = prod * lad.Mt(l, 0, z) * lad.Q0(l, z);
    r.add("full product of split factors", rel_residual(U[0](z) * lad.Qchain(m, z), prod));

    const CMatrix Qc = lad.Qchain(ell, z);
    r.add("splitting at ell", rel_residual(U[0](z), solve_right(Uell(z) * Qc * U[ell + 1](z), Qc)));
  }
  return r;
}

}  // namespace momentforge

#endif  // MOMENTFORGE_RESOLVENT_HPP
