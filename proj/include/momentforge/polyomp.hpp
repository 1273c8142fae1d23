#ifndef MOMENTFORGE_POLYOMP_HPP
#define MOMENTFORGE_POLYOMP_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atomic.hpp"
#include "dsparams.hpp"
#include "polynomial.hpp"

namespace momentforge {

/// R_n(z) = (I - z T)^{-1} for the block subdiagonal shift T; lower block-Toeplitz with blocks z^{j-k}.
class ShiftResolvent {
 public:
  ShiftResolvent(std::size_t n, Eigen::Index q) : n_(n), q_(q) {}

  CMatrix operator()(cplx z) const {
    const auto N = static_cast<Eigen::Index>(n_ + 1);
    CMatrix R = zeros(N * q_, N * q_);
    for (Eigen::Index j = 0; j < N; ++j) {
      cplx p = 1.0;
      for (Eigen::Index k = j; k >= 0; --k) {
        R.block(j * q_, k * q_, q_, q_) = p * identity(q_);
        p *= z;
      }
    }
    return R;
  }

  // block subdiagonal shift T
  CMatrix shift() const {
    const auto N = static_cast<Eigen::Index>(n_ + 1);
    CMatrix T = zeros(N * q_, N * q_);
    for (Eigen::Index j = 1; j < N; ++j) T.block(j * q_, (j - 1) * q_, q_, q_) = identity(q_);
    return T;
  }

 private:
  std::size_t n_;
  Eigen::Index q_;
};

inline ShiftResolvent shift_resolvent(std::size_t n, Eigen::Index q) { return {n, q}; }

namespace detail {

// Coefficients of Zrow [R(conj z)]^* W: the z^j coefficient is sum_i Zrow_i W_{i+j}.
inline MatrixPoly shift_form(const CMatrix& Zrow, const CMatrix& W) {
  const Eigen::Index q = W.cols();
  const Eigen::Index N = W.rows() / q;
  std::vector<CMatrix> c;
  for (Eigen::Index j = 0; j < N; ++j) {
    CMatrix acc = zeros(Zrow.rows(), q);
    for (Eigen::Index i = 0; i + j < N; ++i) acc += Zrow.middleCols(i * q, q) * W.middleRows((i + j) * q, q);
    c.push_back(std::move(acc));
  }
  return MatrixPoly(std::move(c));
}

// u_n = (0; -s_0; ...; -s_{n-1})
inline CMatrix u_column(const MomentSequence& seq, std::size_t n) {
  const Eigen::Index q = seq.q();
  CMatrix u = zeros(static_cast<Eigen::Index>(n + 1) * q, q);
  if (n > 0) u.bottomRows(static_cast<Eigen::Index>(n) * q) = -y_block(seq, 0, n - 1);
  return u;
}

inline std::string hname(char c, std::size_t n) { return std::string(1, c) + "_" + std::to_string(n); }

}  // namespace detail

struct AbcdPolys {
  MatrixPoly alpha, beta, gamma, delta;
};

// alpha_n and gamma_n; needs 2n <= m
inline std::pair<MatrixPoly, MatrixPoly> alpha_gamma(const MomentSequence& seq, std::size_t n) {
  require_order(seq, 2 * n, "alpha_n");
  const Eigen::Index q = seq.q();
  const CMatrix Hv = solve(build_H(seq, n), detail::unit_column(n, q), detail::hname('H', n));
  const MatrixPoly alpha = MatrixPoly::constant(identity(q)) - detail::shift_form(detail::u_column(seq, n).adjoint(), Hv).times_z();
  const MatrixPoly gamma = -detail::shift_form(detail::unit_column(n, q).adjoint(), Hv).times_z();
  return {alpha, gamma};
}

// beta_n and delta_n; needs 2n - 1 <= m
inline std::pair<MatrixPoly, MatrixPoly> beta_delta(const MomentSequence& seq, std::size_t n) {
  const Eigen::Index q = seq.q();
  if (n == 0) return {MatrixPoly::constant(zeros(q, q)), MatrixPoly::constant(identity(q))};
  require_order(seq, 2 * n - 1, "beta_n");
  const CMatrix y = y_block(seq, 0, n - 1);
  const CMatrix Ky = solve(build_K(seq, n - 1), y, detail::hname('K', n - 1));
  const MatrixPoly beta = detail::shift_form(y.adjoint(), Ky);
  const MatrixPoly delta = MatrixPoly::constant(identity(q)) - detail::shift_form(detail::unit_column(n - 1, q).adjoint(), Ky).times_z();
  return {beta, delta};
}

inline AbcdPolys abcd_polys(const MomentSequence& seq, std::size_t n) {
  auto [a, g] = alpha_gamma(seq, n);
  auto [b, d] = beta_delta(seq, n);
  return {a, b, g, d};
}

/// First-kind p and second-kind q polynomials for H (p_H, q_H) and for the shifted data (p_K, q_K).
struct OmpQuadruple {
  std::vector<MatrixPoly> pH, qH, pK, qK;
};

/// Builds p_H,n, q_H,n for 2n - 1 <= m and p_K,n, q_K,n for 2n <= m, each capped at n <= upto_n.
inline OmpQuadruple omp_quadruple(const MomentSequence& seq, std::size_t upto_n) {
  const Eigen::Index q = seq.q();
  const std::size_t m = seq.order();
  OmpQuadruple quad;
  quad.pH.push_back(MatrixPoly::constant(identity(q)));
  quad.qH.push_back(MatrixPoly::constant(zeros(q, q)));
  quad.pK.push_back(MatrixPoly::constant(identity(q)));
  quad.qK.push_back(MatrixPoly::constant(seq[0]));
  for (std::size_t n = 1; n <= upto_n && 2 * n - 1 <= m; ++n) {
    const auto N = static_cast<Eigen::Index>(n);
    CMatrix W(static_cast<Eigen::Index>(n + 1) * q, q);
    W.topRows(N * q) = -solve(build_H(seq, n - 1), y_block(seq, n, 2 * n - 1), detail::hname('H', n - 1));
    W.bottomRows(q) = identity(q);
    quad.pH.push_back(detail::shift_form(detail::unit_column(n, q).adjoint(), W));
    quad.qH.push_back(-detail::shift_form(detail::u_column(seq, n).adjoint(), W));
  }
  for (std::size_t n = 1; n <= upto_n && 2 * n <= m; ++n) {
    const auto N = static_cast<Eigen::Index>(n);
    CMatrix W(static_cast<Eigen::Index>(n + 1) * q, q);
    W.topRows(N * q) = -solve(build_K(seq, n - 1), y_block(seq, n + 1, 2 * n), detail::hname('K', n - 1));
    W.bottomRows(q) = identity(q);
    quad.pK.push_back(detail::shift_form(detail::unit_column(n, q).adjoint(), W));
    quad.qK.push_back(detail::shift_form(z_block(seq, 0, n), W));
  }
  return quad;
}

struct ValuesAtZero {
  CMatrix pH0;
  std::optional<CMatrix> qK0;  // needs M_n
};

/// p_H,n(0) = (-1)^n (prod_{k<n} M_k L_k)^{-1}, q_K,n(0) = (-1)^n ((prod_{k<n} M_k L_k) M_n)^{-1}.
inline ValuesAtZero omp_values_at_zero(const DSParams& ds, std::size_t n) {
  ds.validate();
  if (n > ds.lengths.size()) throw Error(ErrorKind::length, "not enough DS parameters for p_H,n(0)");
  CMatrix P = identity(ds.q);
  for (std::size_t k = 0; k < n; ++k) P = P * ds.masses[k] * ds.lengths[k];
  const double sign = n % 2 == 0 ? 1.0 : -1.0;
  ValuesAtZero v{sign * inverse(P, "mass-length product"), std::nullopt};
  if (n < ds.masses.size()) v.qK0 = sign * inverse(P * ds.masses[n], "mass-length product");
  return v;
}

enum class Family { H, K };

struct OrthogonalityReport {
  double offdiag = 0.0;            // max residual of the integrals for j != k
  double diag = 0.0;               // max residual of the diagonal integrals against L_n / Lambda_n
  double monic = 0.0;              // max residual of leading coefficients against I
  std::vector<CMatrix> gram_diag;  // integrals P_n^* dsigma P_n
};

/// Integrals of P_j^* dsigma P_k over an atomic measure (t-weighted for family K).
inline OrthogonalityReport monic_orthogonality_check(std::span<const MatrixPoly> polys, const AtomicMeasure& mu,
                                                     Family family, const MomentSequence& seq,
                                                     const TolerancePolicy& tol = {}) {
  const MomentSequence ms = measure_moments(mu, seq.order());
  for (std::size_t j = 0; j <= seq.order(); ++j)
    if (rel_residual(ms[j], seq[j]) > tol.rtol_identity)
      throw Error(ErrorKind::moment_mismatch, "measure moment " + std::to_string(j) + " differs from s_" +
                                                  std::to_string(j));
  const AtomicMeasure nu = family == Family::H ? mu : shifted_measure(mu);
  const std::size_t off = family == Family::H ? 0 : 1;
  OrthogonalityReport r;
  for (std::size_t j = 0; j < polys.size(); ++j) {
    r.monic = std::max(r.monic, rel_residual(polys[j].coeff(j), identity(seq.q())));
    for (std::size_t k = 0; k < polys.size(); ++k) {
      CMatrix G = zeros(seq.q(), seq.q());
      for (const auto& a : nu.atoms()) G += polys[j](a.t).adjoint() * a.w * polys[k](a.t);
      if (j != k) {
        r.offdiag = std::max(r.offdiag, max_abs(G) / (1.0 + max_abs(seq[0])));
        continue;
      }
      r.gram_diag.push_back(G);
      if (2 * j + off <= seq.order()) {
        const CMatrix expect = family == Family::H ? schur_L(seq, j, tol) : schur_Lambda(seq, j, tol);
        r.diag = std::max(r.diag, rel_residual(G, expect));
      }
    }
  }
  return r;
}

/// Orthogonality through the Hankel form: Y_j^* H Y_k = 0 for j != k, with H built from s_{.+off}.
/// Returns {max off-diagonal residual, max diagonal residual against `diag`}.
inline std::pair<double, double> hankel_orthogonality(std::span<const MatrixPoly> polys, const MomentSequence& seq,
                                                      std::size_t off, std::span<const CMatrix> diag) {
  if (polys.empty()) return {0.0, 0.0};
  const std::size_t N = polys.size() - 1;
  const CMatrix H = build_hankel(seq, N, off);
  std::vector<CMatrix> Y;
  for (const auto& p : polys) Y.push_back(p.stacked(N));
  double od = 0.0, dg = 0.0;
  const double scale = 1.0 + max_abs(H);
  for (std::size_t j = 0; j <= N; ++j)
    for (std::size_t k = 0; k <= N; ++k) {
      const CMatrix G = Y[j].adjoint() * H * Y[k];
      if (j != k) od = std::max(od, max_abs(G) / scale);
      else if (j < diag.size()) dg = std::max(dg, rel_residual(G, diag[j]));
    }
  return {od, dg};
}

/// Polynomial identities linking the sequence with its first transform, evaluated at off-axis samples.
inline Residuals transform_poly_identities(const MomentSequence& seq, std::size_t n, std::span<const cplx> z_samples,
                                           const TolerancePolicy& tol = {}) {
  require_order(seq, 2 * n, "transform polynomial identities");
  const CMatrix& s0 = seq[0];
  const MomentSequence t = transform1(seq, tol);
  const OmpQuadruple a = omp_quadruple(seq, n);
  const OmpQuadruple b = omp_quadruple(t, n);
  const DSParams ds = ds_forward(seq);
  Residuals r;

  for (cplx z : z_samples) {
    r.add("first kind of transform from q_K", rel_residual(b.pH[n](z), solve(s0, a.qK[n](z))));
    r.add("second kind of transform from q_K, p_K", rel_residual(b.qH[n](z), a.qK[n](z) - s0 * a.pK[n](z)));
    if (n >= 1) {
      r.add("shifted first kind of transform from q_H", rel_residual(b.pK[n - 1](z), solve(s0, a.qH[n](z))));
      r.add("shifted second kind of transform from q_H, p_H",
            rel_residual(b.qK[n - 1](z), z * a.qH[n](z) - s0 * a.pH[n](z)));
      const CMatrix lhs = s0 * solve_right(a.pH[n](z), a.qH[n](z)) * s0 + solve_right(b.qK[n - 1](z), b.pK[n - 1](z));
      r.add("H-side quotient sum", rel_residual(lhs, z * s0));
    }
    const CMatrix lhs = s0 * solve_right(a.pK[n](z), a.qK[n](z)) * s0 + solve_right(b.qH[n](z), b.pH[n](z));
    r.add("K-side quotient sum", rel_residual(lhs, s0));
  }

  const ValuesAtZero v = omp_values_at_zero(ds, n);
  if (v.qK0) r.add("first kind of transform at zero", rel_residual(b.pH[n](0.0), solve(s0, *v.qK0)));
  if (n >= 1) r.add("shifted second kind of transform at zero", rel_residual(b.qK[n - 1](0.0), -s0 * v.pH0));
  return r;
}

/// Lengths and masses from those of the 2m-th and (2m+1)-th transforms, conjugated by values at zero.
inline Residuals value_at_zero_conjugations(const MomentSequence& seq, std::size_t k, std::size_t m,
                                            const TolerancePolicy& tol = {}) {
  require_order(seq, 2 * k + 2, "value-at-zero conjugations");
  if (m > k) throw Error(ErrorKind::length, "conjugation depth exceeds index");
  const DSParams d = ds_forward(seq);
  const DSParams e = ds_forward(transformK(seq, 2 * m, tol));
  const DSParams o = ds_forward(transformK(seq, 2 * m + 1, tol));
  const OmpQuadruple quad = omp_quadruple(seq, m);
  const CMatrix p0 = quad.pH[m](0.0), q0 = quad.qK[m](0.0);
  const CMatrix p0inv = inverse(p0, "p_H,m(0)"), q0inv = inverse(q0, "q_K,m(0)");
  Residuals r;
  r.add("lengths via even transform", rel_residual(d.lengths[k], p0inv.adjoint() * e.lengths[k - m] * p0inv));
  r.add("lengths via odd transform", rel_residual(d.lengths[k], q0 * o.masses[k - m] * q0.adjoint()));
  r.add("masses via even transform", rel_residual(d.masses[k], p0 * e.masses[k - m] * p0.adjoint()));
  r.add("masses via odd transform", rel_residual(d.masses[k + 1], q0inv.adjoint() * o.lengths[k - m] * q0inv));
  return r;
}

}  // namespace momentforge

#endif  // MOMENTFORGE_POLYOMP_HPP
