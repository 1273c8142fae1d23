#ifndef MOMENTFORGE_MEASURES_HPP
#define MOMENTFORGE_MEASURES_HPP

#include <span>
#include <vector>

#include "resolvent.hpp"

namespace momentforge {

/// S(z) = N(z) D(z)^{-1}
struct RationalMatrixFn {
  MatrixPoly N, D;

  CMatrix operator()(cplx z) const {
    const CMatrix d = D(z);
    if (!(rcond_estimate(d) > singular_rcond)) throw Error(ErrorKind::domain, "denominator singular at sample");
    return solve_right(N(z), d);
  }
};

struct ConstantPair {
  CMatrix phi, psi;

  // rank [phi; psi] = q, phi^* psi Hermitian and nonnegative
  bool valid(const TolerancePolicy& tol = {}) const {
    if (phi.rows() != psi.rows() || phi.cols() != psi.cols() || phi.rows() != phi.cols()) return false;
    CMatrix st(2 * phi.rows(), phi.cols());
    st << phi, psi;
    Eigen::JacobiSVD<CMatrix> svd(st);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= tol.pinv_rcond * sv(0)) return false;
    const CMatrix g = phi.adjoint() * psi;
    return is_hermitian(g, tol) && is_nonneg_definite(g, tol);
  }
};

/// (A phi + B psi)(C phi + D psi)^{-1} at z
inline CMatrix lft_constant_pair(const ResolventMatrix& U, const ConstantPair& pair, cplx z,
                                 const TolerancePolicy& tol = {}) {
  if (!pair.valid(tol)) throw Error(ErrorKind::structure, "constant pair violates the pair conditions");
  const Eigen::Index q = U.q;
  const CMatrix u = U(z);
  const CMatrix num = u.topLeftCorner(q, q) * pair.phi + u.topRightCorner(q, q) * pair.psi;
  const CMatrix den = u.bottomLeftCorner(q, q) * pair.phi + u.bottomRightCorner(q, q) * pair.psi;
  if (!(rcond_estimate(den) > singular_rcond)) throw Error(ErrorKind::domain, "LFT denominator singular at sample");
  return solve_right(num, den);
}

struct ExtremalTransforms {
  RationalMatrixFn S_min, S_max;
};

/// S_min = -q_K,n (z p_K,n)^{-1}, S_max = -q_H,h p_H,h^{-1} with n = floor(m/2), h = ceil(m/2).
inline ExtremalTransforms extremal_transforms(const OmpQuadruple& quad, std::size_t m) {
  const std::size_t n = m / 2;
  const std::size_t h = m % 2 == 0 ? n : n + 1;
  if (n >= quad.qK.size() || h >= quad.qH.size()) throw Error(ErrorKind::length, "polynomials missing for order");
  return {{-quad.qK[n], quad.pK[n].times_z()}, {-quad.qH[h], quad.pH[h]}};
}

enum class Extremal { min, max };

/// Bottom-up evaluation of v_k = (-z M_k + (L_k + v_{k+1})^{-1})^{-1}; returns v_0.
/// min: v_n = (-z M_n)^{-1}; max: v_n = 0 (so the innermost level is (-z M_{n-1} + L_{n-1}^{-1})^{-1}).
inline CMatrix continued_fraction_eval(const DSParams& ds, std::size_t n, cplx z, Extremal which) {
  ds.validate();
  const Eigen::Index q = ds.q;
  if (n > ds.lengths.size() || (which == Extremal::min && n >= ds.masses.size()))
    throw Error(ErrorKind::length, "not enough DS parameters for the requested depth");
  auto inv = [](const CMatrix& A, std::size_t level) {
    if (!(rcond_estimate(A) > singular_rcond))
      throw Error(ErrorKind::domain, "singular continued-fraction level " + std::to_string(level));
    return solve(A, identity(A.rows()));
  };
  CMatrix v = which == Extremal::min ? inv(-z * ds.masses[n], n) : zeros(q, q);
  bool zero_tail = which == Extremal::max;
  for (std::size_t k = n; k-- > 0;) {
    const CMatrix inner = zero_tail ? inv(ds.lengths[k], k) : inv(ds.lengths[k] + v, k);
    v = inv(-z * ds.masses[k] + inner, k);
    zero_tail = false;
  }
  return v;
}

namespace detail {

inline std::vector<cplx> scalar_coeffs(const MatrixPoly& p) {
  std::vector<cplx> c;
  for (const auto& A : p.coeffs()) c.push_back(A(0, 0));
  return c;
}

inline cplx eval_scalar(const std::vector<cplx>& c, cplx z) {
  cplx acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
  return acc;
}

}  // namespace detail

/// Atoms of a scalar rational Stieltjes transform: nodes at the roots of D, weights -N(t)/D'(t).
inline AtomicMeasure recover_scalar_measure(const RationalMatrixFn& S, double root_tol = 1e-9) {
  if (S.N.rows() != 1 || S.D.rows() != 1) throw Error(ErrorKind::scope, "measure recovery is implemented for q = 1");
  std::vector<cplx> num = detail::scalar_coeffs(S.N), den = detail::scalar_coeffs(S.D);
  double scale = 0.0;
  for (cplx c : den) scale = std::max(scale, std::abs(c));
  while (!den.empty() && std::abs(den.back()) <= 1e-13 * scale) den.pop_back();
  const int d = static_cast<int>(den.size()) - 1;
  if (d < 0) throw Error(ErrorKind::not_stieltjes, "zero denominator");
  double nscale = 0.0;
  for (cplx c : num) nscale = std::max(nscale, std::abs(c));
  int dn = static_cast<int>(num.size()) - 1;
  while (dn >= 0 && std::abs(num[dn]) <= 1e-13 * std::max(nscale, 1.0)) --dn;
  if (dn < 0) return AtomicMeasure(1, {});
  if (dn >= d) throw Error(ErrorKind::not_stieltjes, "transform does not vanish at infinity");

  // companion matrix of the monic denominator
  CMatrix C = zeros(d, d);
  for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) C(i, d - 1) = -den[i] / den[d];
  Eigen::ComplexEigenSolver<CMatrix> es(C, false);
  std::vector<double> roots;
  for (int i = 0; i < d; ++i) {
    const cplx r = es.eigenvalues()(i);
    if (std::abs(r.imag()) > root_tol * (1.0 + std::abs(r)) || r.real() < -root_tol)
      throw Error(ErrorKind::not_stieltjes, "denominator root off [0, inf)");
    roots.push_back(std::max(0.0, r.real()));
  }
  std::sort(roots.begin(), roots.end());
  std::vector<cplx> dden;
  for (int i = 1; i <= d; ++i) dden.push_back(static_cast<double>(i) * den[i]);
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (i > 0 && roots[i] - roots[i - 1] <= root_tol * (1.0 + roots[i]))
      throw Error(ErrorKind::not_stieltjes, "repeated denominator root");
    const cplx w = -detail::eval_scalar(num, roots[i]) / detail::eval_scalar(dden, roots[i]);
    if (w.real() <= 0.0 || std::abs(w.imag()) > root_tol * (1.0 + std::abs(w)))
      throw Error(ErrorKind::not_stieltjes, "non-positive residue");
    atoms.push_back({roots[i], CMatrix::Constant(1, 1, w.real())});
  }
  return AtomicMeasure(1, std::move(atoms));
}

/// Moments of the recovered extremal measure (upper for odd m, lower for even m) against the zero extension.
inline Residuals extremal_moment_check(const MomentSequence& seq, std::size_t m, const TolerancePolicy& tol = {}) {
  if (seq.q() != 1) throw Error(ErrorKind::scope, "extremal moment check is scalar only");
  require_order(seq, m, "extremal moment check");
  const MomentSequence s = seq.truncated(m);
  const ExtremalTransforms ex = extremal_transforms(omp_quadruple(s, m / 2 + 1), m);
  const AtomicMeasure mu = recover_scalar_measure(m % 2 == 1 ? ex.S_max : ex.S_min);
  const MomentSequence got = measure_moments(mu, m + 4);
  const MomentSequence want = zero_extension(s, m + 4, tol);
  Residuals r;
  for (std::size_t j = 0; j <= m + 4; ++j) r.add("extremal measure moments vs zero extension", rel_residual(got[j], want[j]));
  return r;
}

/// Lower/upper extremal transforms of the first transform from those of the sequence.
inline Residuals extremal_transform_relation_check(const MomentSequence& seq, std::size_t n,
                                                   std::span<const cplx> z_samples, const TolerancePolicy& tol = {}) {
  if (n == 0) throw Error(ErrorKind::length, "relation needs n >= 1");
  require_order(seq, 2 * n, "extremal relation");
  const CMatrix& s0 = seq[0];
  const ExtremalTransforms ex = extremal_transforms(omp_quadruple(seq, n), 2 * n);
  const MomentSequence t = transform1(seq, tol);
  const OmpQuadruple qt = omp_quadruple(t, n);
  const ExtremalTransforms e_even = extremal_transforms(qt, 2 * n - 2);
  const ExtremalTransforms e_odd = extremal_transforms(qt, 2 * n - 1);
  Residuals r;
  for (cplx z : z_samples) {
    const CMatrix rhs_min = -s0 - s0 * solve(z * ex.S_max(z), s0);
    const CMatrix rhs_max = -s0 - s0 * solve(z * ex.S_min(z), s0);
    r.add("transformed lower from upper", rel_residual(e_even.S_min(z), rhs_min));
    r.add("transformed upper from lower", rel_residual(e_odd.S_max(z), rhs_max));
    const cplx zc = std::conj(z);
    r.add("conjugate symmetry", rel_residual(ex.S_min(zc), ex.S_min(z).adjoint()));
    r.add("conjugate symmetry", rel_residual(ex.S_max(zc), ex.S_max(z).adjoint()));
  }
  return r;
}

}  // namespace momentforge

#endif  // MOMENTFORGE_MEASURES_HPP
