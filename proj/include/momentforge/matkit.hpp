#ifndef MOMENTFORGE_MATKIT_HPP
#define MOMENTFORGE_MATKIT_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace momentforge {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

struct TolerancePolicy {
  double rtol_identity = 1e-8;
  double psd_floor = 1e-10;
  double pinv_rcond = 1e-12;

  void validate() const {
    auto ok = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!ok(rtol_identity) || !ok(psd_floor) || !ok(pinv_rcond))
      throw Error(ErrorKind::domain, "tolerances must lie in (0, 1]");
  }
};

inline CMatrix identity(Eigen::Index q) { return CMatrix::Identity(q, q); }
inline CMatrix zeros(Eigen::Index r, Eigen::Index c) { return CMatrix::Zero(r, c); }

inline double max_abs(const CMatrix& A) {
  return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

inline bool all_finite(const CMatrix& A) {
  for (Eigen::Index i = 0; i < A.size(); ++i) {
    const cplx v = A.data()[i];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

inline void require_finite(const CMatrix& A, const std::string& what) {
  if (!all_finite(A)) throw Error(ErrorKind::domain, what + " has non-finite entries");
}

inline void require_square(const CMatrix& A, const std::string& what) {
  if (A.rows() != A.cols())
    throw Error(ErrorKind::dimension, what + " is " + std::to_string(A.rows()) + "x" +
                                          std::to_string(A.cols()) + ", expected square");
}

// max|A - B| / (1 + max(max|A|, max|B|))
inline double rel_residual(const CMatrix& A, const CMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw Error(ErrorKind::dimension, "residual of differently shaped matrices");
  return max_abs(A - B) / (1.0 + std::max(max_abs(A), max_abs(B)));
}

inline CMatrix hermitize(const CMatrix& A) {
  require_square(A, "matrix");
  return 0.5 * (A + A.adjoint());
}

inline bool is_hermitian(const CMatrix& A, const TolerancePolicy& tol = {}) {
  require_square(A, "matrix");
  return max_abs(A - A.adjoint()) <= tol.rtol_identity * (1.0 + max_abs(A));
}

// Ascending eigenvalues of the Hermitian part.
inline Eigen::VectorXd hermitian_eigenvalues(const CMatrix& A) {
  require_square(A, "matrix");
  if (A.size() == 0) return Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(A), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

namespace detail {
inline Eigen::VectorXd checked_spectrum(const CMatrix& A, const TolerancePolicy& tol) {
  if (!is_hermitian(A, tol)) throw Error(ErrorKind::structure, "definiteness test on non-Hermitian matrix");
  return hermitian_eigenvalues(A);
}
}  // namespace detail

inline bool is_nonneg_definite(const CMatrix& A, const TolerancePolicy& tol = {}) {
  const Eigen::VectorXd ev = detail::checked_spectrum(A, tol);
  if (ev.size() == 0) return true;
  const double norm = ev.cwiseAbs().maxCoeff();
  return ev(0) >= -tol.psd_floor * norm;
}

inline bool is_pos_definite(const CMatrix& A, const TolerancePolicy& tol = {}) {
  const Eigen::VectorXd ev = detail::checked_spectrum(A, tol);
  if (ev.size() == 0) return true;
  const double norm = ev.cwiseAbs().maxCoeff();
  return ev(0) > tol.psd_floor * norm;
}

inline double spectral_norm(const CMatrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(A);
  return svd.singularValues()(0);
}

/// Moore-Penrose inverse from the SVD, discarding singular values below pinv_rcond * sigma_max.
inline CMatrix moore_penrose(const CMatrix& A, const TolerancePolicy& tol = {}) {
  if (A.size() == 0) return zeros(A.cols(), A.rows());
  Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cut = tol.pinv_rcond * sv(0);
  CMatrix G = zeros(A.cols(), A.rows());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cut || sv(i) == 0.0) break;
    G += svd.matrixV().col(i) * (1.0 / sv(i)) * svd.matrixU().col(i).adjoint();
  }
  return G;
}

/// A^+ B without forming A^+; complete orthogonal decomposition with the same cutoff.
inline CMatrix pseudo_solve(const CMatrix& A, const CMatrix& B, const TolerancePolicy& tol = {}) {
  if (A.rows() != B.rows()) throw Error(ErrorKind::dimension, "pseudo_solve row mismatch");
  if (A.size() == 0 || max_abs(A) == 0.0) return zeros(A.cols(), B.cols());
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod;
  cod.setThreshold(tol.pinv_rcond);
  cod.compute(A);
  return cod.solve(B);
}

/// Reciprocal condition estimate (1-norm) of a square matrix; 0 when singular.
inline double rcond_estimate(const CMatrix& A) {
  require_square(A, "matrix");
  if (A.size() == 0) return 1.0;
  Eigen::PartialPivLU<CMatrix> lu(A);
  const double r = lu.rcond();
  return std::isfinite(r) ? r : 0.0;
}

inline double condition_estimate(const CMatrix& A) {
  const double r = rcond_estimate(A);
  return r > 0.0 ? 1.0 / r : std::numeric_limits<double>::infinity();
}

// Threshold below which a block counts as singular for plain inversion.
inline constexpr double singular_rcond = 1e-15;

/// A^{-1} B via LU. Throws a conditioning error naming `what` if A is numerically singular.
inline CMatrix solve(const CMatrix& A, const CMatrix& B, const std::string& what = "matrix") {
  require_square(A, what);
  if (A.rows() != B.rows()) throw Error(ErrorKind::dimension, what + ": right-hand side row mismatch");
  if (A.size() == 0) return B;
  Eigen::PartialPivLU<CMatrix> lu(A);
  const double r = lu.rcond();
  if (!(r > singular_rcond)) throw Error(ErrorKind::conditioning, what + " is singular");
  return lu.solve(B);
}

inline CMatrix inverse(const CMatrix& A, const std::string& what = "matrix") {
  return solve(A, identity(A.rows()), what);
}

// B A^{-1}
inline CMatrix solve_right(const CMatrix& B, const CMatrix& A, const std::string& what = "matrix") {
  return solve(A.adjoint(), B.adjoint(), what).adjoint();
}

}  // namespace momentforge

#endif  // MOMENTFORGE_MATKIT_HPP
