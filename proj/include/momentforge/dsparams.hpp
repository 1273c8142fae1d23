#ifndef MOMENTFORGE_DSPARAMS_HPP
#define MOMENTFORGE_DSPARAMS_HPP

#include <utility>
#include <vector>

#include "residuals.hpp"
#include "schur.hpp"

namespace momentforge {

/// Lengths L_0..L_{kL} and masses M_0..M_{kM}; kM = floor(m/2), kL = floor((m-1)/2).
struct DSParams {
  Eigen::Index q = 0;
  std::vector<CMatrix> lengths;
  std::vector<CMatrix> masses;

  std::size_t order() const { return lengths.size() + masses.size() - 1; }

  void validate() const {
    if (masses.empty()) throw Error(ErrorKind::length, "DS parameters need M_0");
    if (masses.size() != lengths.size() && masses.size() != lengths.size() + 1)
      throw Error(ErrorKind::length, "inconsistent numbers of lengths and masses");
    for (const auto* list : {&lengths, &masses})
      for (const auto& A : *list) {
        if (A.rows() != q || A.cols() != q) throw Error(ErrorKind::dimension, "DS parameter is not q x q");
        require_finite(A, "DS parameter");
      }
  }
};

namespace detail {

inline CMatrix unit_column(std::size_t n, Eigen::Index q) {
  CMatrix v = zeros(static_cast<Eigen::Index>(n + 1) * q, q);
  v.topRows(q) = identity(q);
  return v;
}

// v_k^* H_k^{-1} v_k
inline CMatrix h_corner(const MomentSequence& seq, std::size_t k) {
  const CMatrix H = build_H(seq, k);
  return solve(H, unit_column(k, seq.q()), "H_" + std::to_string(k)).topRows(seq.q());
}

// y_{0,k}^* K_k^{-1} y_{0,k}
inline CMatrix k_form(const MomentSequence& seq, std::size_t k) {
  const CMatrix K = build_K(seq, k);
  const CMatrix y = y_block(seq, 0, k);
  return y.adjoint() * solve(K, y, "K_" + std::to_string(k));
}

}  // namespace detail

inline DSParams ds_forward(const MomentSequence& seq) {
  const std::size_t m = seq.order();
  DSParams ds{seq.q(), {}, {}};
  CMatrix prev = zeros(seq.q(), seq.q());
  for (std::size_t k = 0; 2 * k <= m; ++k) {
    CMatrix cur = detail::h_corner(seq, k);
    ds.masses.push_back(cur - prev);
    prev = std::move(cur);
  }
  prev = zeros(seq.q(), seq.q());
  for (std::size_t k = 0; 2 * k + 1 <= m; ++k) {
    CMatrix cur = detail::k_form(seq, k);
    ds.lengths.push_back(cur - prev);
    prev = std::move(cur);
  }
  return ds;
}

inline DSParams ds_from_sp(const StieltjesParam& sp) {
  sp.validate();
  const std::size_t m = sp.order();
  const Eigen::Index q = sp.q;
  DSParams ds{q, {}, {}};
  auto name = [](std::size_t j) { return "Q_" + std::to_string(j); };
  CMatrix P = identity(q);   // prod_{j<=k} Q_{2j} Q_{2j+1}^{-1}
  CMatrix Pm = identity(q);  // prod_{j<k} Q_{2j}^{-1} Q_{2j+1}
  for (std::size_t k = 0; 2 * k <= m; ++k) {
    ds.masses.push_back(Pm * inverse(sp[2 * k], name(2 * k)) * Pm.adjoint());
    if (2 * k + 1 > m) break;
    P = P * solve_right(sp[2 * k], sp[2 * k + 1], name(2 * k + 1));
    ds.lengths.push_back(P * sp[2 * k + 1] * P.adjoint());
    Pm = Pm * solve(sp[2 * k], sp[2 * k + 1], name(2 * k));
  }
  return ds;
}

inline StieltjesParam sp_from_ds(const DSParams& ds) {
  ds.validate();
  const Eigen::Index q = ds.q;
  StieltjesParam sp{q, {}};
  CMatrix A = identity(q);  // prod_{j<k} M_j L_j
  for (std::size_t k = 0; k < ds.masses.size(); ++k) {
    const CMatrix Ainv = inverse(A, "mass-length product");
    sp.params.push_back(Ainv.adjoint() * inverse(ds.masses[k], "M_" + std::to_string(k)) * Ainv);
    if (k >= ds.lengths.size()) break;
    A = A * ds.masses[k] * ds.lengths[k];
    const CMatrix Binv = inverse(A, "mass-length product");
    sp.params.push_back(Binv.adjoint() * ds.lengths[k] * Binv);
  }
  return sp;
}

struct ScalarKsParams {
  std::vector<double> l;
  std::vector<double> m;
};

/// Determinant formulas l_k = D_k^2 / (N_k N_{k-1}), m_k = N_{k-1}^2 / (D_k D_{k-1}); scalar case only.
inline ScalarKsParams scalar_ks_params(const MomentSequence& seq) {
  if (seq.q() != 1) throw Error(ErrorKind::scope, "determinant parameters are defined for q = 1 only");
  const std::size_t m = seq.order();
  std::vector<double> dH, dK;
  for (std::size_t n = 0; 2 * n <= m; ++n) dH.push_back(build_H(seq, n).determinant().real());
  for (std::size_t n = 0; 2 * n + 1 <= m; ++n) dK.push_back(build_K(seq, n).determinant().real());
  auto at = [](const std::vector<double>& v, std::size_t k) { return k == 0 ? 1.0 : v[k - 1]; };  // index k-1
  ScalarKsParams r;
  for (std::size_t k = 0; k < dH.size(); ++k) {
    const double den = dH[k] * at(dH, k);
    if (den == 0.0) throw Error(ErrorKind::conditioning, "vanishing Hankel determinant");
    r.m.push_back(at(dK, k) * at(dK, k) / den);
  }
  for (std::size_t k = 0; k < dK.size(); ++k) {
    const double den = dK[k] * at(dK, k);
    if (den == 0.0) throw Error(ErrorKind::conditioning, "vanishing Hankel determinant");
    r.l.push_back(dH[k] * dH[k] / den);
  }
  return r;
}

/// DS parameters of the first transform from those of the sequence and s_0.
inline DSParams ds_of_transform(const DSParams& ds, const CMatrix& s0) {
  ds.validate();
  if (ds.order() == 0) throw Error(ErrorKind::length, "transform of an order-0 sequence");
  const CMatrix s0inv = inverse(s0, "s_0");
  DSParams out{ds.q, {}, {}};
  for (std::size_t k = 0; k + 1 < ds.masses.size(); ++k) out.lengths.push_back(s0 * ds.masses[k + 1] * s0);
  for (const auto& L : ds.lengths) out.masses.push_back(s0inv * L * s0inv);
  return out;
}

/// Residuals of the closed forms of transformed DS parameters, their descent by 2m steps,
/// and the one-step swap, for transforms of order ell.
inline Residuals ds_shift_check(const MomentSequence& seq, std::size_t ell, std::size_t k, std::size_t m,
                                const TolerancePolicy& tol = {}) {
  require_order(seq, ell + 2 * k + 2, "shift check");
  if (m > k) throw Error(ErrorKind::length, "descent depth exceeds index");
  const StieltjesParam sp = sp_forward(seq, tol);
  const auto& Q = sp.params;
  const Eigen::Index q = seq.q();
  auto ds_at = [&](std::size_t l) { return ds_forward(transformK(seq, l, tol)); };
  const DSParams d0 = ds_at(ell), d1 = ds_at(ell + 1), d2m = ds_at(ell + 2 * m);
  Residuals r;

  CMatrix P = identity(q), Pm = identity(q);
  for (std::size_t j = 0; j <= k; ++j) {
    P = P * solve_right(Q[2 * j + ell], Q[2 * j + ell + 1]);
    if (j < k) Pm = Pm * solve(Q[2 * j + ell], Q[2 * j + ell + 1]);
  }
  r.add("lengths closed form", rel_residual(d0.lengths[k], P * Q[2 * k + 1 + ell] * P.adjoint()));
  r.add("masses closed form", rel_residual(d0.masses[k], Pm * inverse(Q[2 * k + ell]) * Pm.adjoint()));

  CMatrix B = identity(q), A = identity(q);
  for (std::size_t j = 0; j < m; ++j) {
    B = B * solve_right(Q[2 * j + ell], Q[2 * j + ell + 1]);
    A = A * solve(Q[2 * j + ell], Q[2 * j + ell + 1]);
  }
  r.add("lengths descent", rel_residual(d0.lengths[k], B * d2m.lengths[k - m] * B.adjoint()));
  r.add("masses descent", rel_residual(d0.masses[k], A * d2m.masses[k - m] * A.adjoint()));

  const CMatrix& Ql = Q[ell];
  r.add("one-step swap lengths", rel_residual(d1.lengths[k], Ql * d0.masses[k + 1] * Ql));
  r.add("one-step swap masses", rel_residual(d1.masses[k], solve_right(solve(Ql, d0.lengths[k]), Ql)));
  return r;
}

}  // namespace momentforge

#endif  // MOMENTFORGE_DSPARAMS_HPP
