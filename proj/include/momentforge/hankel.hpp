#ifndef MOMENTFORGE_HANKEL_HPP
#define MOMENTFORGE_HANKEL_HPP

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "matkit.hpp"

namespace momentforge {

/// Finite sequence s_0, ..., s_m of q x q matrices.
class MomentSequence {
 public:
  MomentSequence() = default;

  explicit MomentSequence(std::vector<CMatrix> moments) : moments_(std::move(moments)) {
    if (moments_.empty()) throw Error(ErrorKind::length, "moment sequence needs at least s_0");
    q_ = moments_.front().rows();
    if (q_ < 1) throw Error(ErrorKind::dimension, "moment size q must be positive");
    for (std::size_t j = 0; j < moments_.size(); ++j) {
      const auto& s = moments_[j];
      if (s.rows() != q_ || s.cols() != q_)
        throw Error(ErrorKind::dimension, "s_" + std::to_string(j) + " is not " + std::to_string(q_) + "x" +
                                              std::to_string(q_));
      require_finite(s, "s_" + std::to_string(j));
    }
  }

  static MomentSequence scalar(const std::vector<cplx>& values) {
    std::vector<CMatrix> ms;
    for (cplx v : values) ms.push_back(CMatrix::Constant(1, 1, v));
    return MomentSequence(std::move(ms));
  }

  Eigen::Index q() const { return q_; }
  std::size_t order() const { return moments_.size() - 1; }  // m
  std::size_t size() const { return moments_.size(); }
  const CMatrix& operator[](std::size_t j) const { return moments_.at(j); }
  const std::vector<CMatrix>& moments() const { return moments_; }

  // s_0, ..., s_k
  MomentSequence truncated(std::size_t k) const {
    if (k > order()) throw Error(ErrorKind::length, "truncation beyond available order");
    return MomentSequence(std::vector<CMatrix>(moments_.begin(), moments_.begin() + static_cast<long>(k) + 1));
  }

  // u_j = s_{j+1}
  MomentSequence shifted() const {
    if (order() < 1) throw Error(ErrorKind::length, "shift needs at least two moments");
    return MomentSequence(std::vector<CMatrix>(moments_.begin() + 1, moments_.end()));
  }

  bool is_hermitian(const TolerancePolicy& tol = {}) const {
    for (const auto& s : moments_)
      if (!momentforge::is_hermitian(s, tol)) return false;
    return true;
  }

 private:
  Eigen::Index q_ = 0;
  std::vector<CMatrix> moments_;
};

struct SequenceClass {
  bool in_Kgg = false;   // Stieltjes nonnegative definite
  bool in_Kgge = false;  // nonnegative definite extendable
  bool in_Kg = false;    // Stieltjes positive definite
  std::optional<std::size_t> completely_degenerate;
};

inline void require_order(const MomentSequence& seq, std::size_t need, const char* what) {
  if (need > seq.order())
    throw Error(ErrorKind::length, std::string(what) + " needs s_" + std::to_string(need) + " but order is " +
                                       std::to_string(seq.order()));
}

// [s_{j+k+off}]_{j,k=0}^n
inline CMatrix build_hankel(const MomentSequence& seq, std::size_t n, std::size_t off) {
  require_order(seq, 2 * n + off, off == 0 ? "H_n" : "K_n");
  const Eigen::Index q = seq.q();
  const auto b = static_cast<Eigen::Index>(n + 1);
  CMatrix H(b * q, b * q);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index k = 0; k < b; ++k) H.block(j * q, k * q, q, q) = seq[static_cast<std::size_t>(j + k) + off];
  return H;
}

inline CMatrix build_H(const MomentSequence& seq, std::size_t n) { return build_hankel(seq, n, 0); }
inline CMatrix build_K(const MomentSequence& seq, std::size_t n) { return build_hankel(seq, n, 1); }

// column stack (s_l; ...; s_m)
inline CMatrix y_block(const MomentSequence& seq, std::size_t l, std::size_t m) {
  if (l > m) throw Error(ErrorKind::length, "y_block with l > m");
  require_order(seq, m, "y_block");
  const Eigen::Index q = seq.q();
  CMatrix Y(static_cast<Eigen::Index>(m - l + 1) * q, q);
  for (std::size_t j = l; j <= m; ++j) Y.middleRows(static_cast<Eigen::Index>(j - l) * q, q) = seq[j];
  return Y;
}

// row stack (s_l, ..., s_m)
inline CMatrix z_block(const MomentSequence& seq, std::size_t l, std::size_t m) {
  if (l > m) throw Error(ErrorKind::length, "z_block with l > m");
  require_order(seq, m, "z_block");
  const Eigen::Index q = seq.q();
  CMatrix Z(q, static_cast<Eigen::Index>(m - l + 1) * q);
  for (std::size_t j = l; j <= m; ++j) Z.middleCols(static_cast<Eigen::Index>(j - l) * q, q) = seq[j];
  return Z;
}

inline CMatrix schur_L(const MomentSequence& seq, std::size_t n, const TolerancePolicy& tol = {}) {
  require_order(seq, 2 * n, "L_n");
  if (n == 0) return seq[0];
  const CMatrix H = build_H(seq, n - 1);
  return seq[2 * n] - z_block(seq, n, 2 * n - 1) * pseudo_solve(H, y_block(seq, n, 2 * n - 1), tol);
}

inline CMatrix schur_Lambda(const MomentSequence& seq, std::size_t n, const TolerancePolicy& tol = {}) {
  require_order(seq, 2 * n + 1, "Lambda_n");
  if (n == 0) return seq[1];
  const CMatrix K = build_K(seq, n - 1);
  return seq[2 * n + 1] - z_block(seq, n + 1, 2 * n) * pseudo_solve(K, y_block(seq, n + 1, 2 * n), tol);
}

// Q_j: L_{j/2} for even j, Lambda_{(j-1)/2} for odd j
inline CMatrix schur_Q(const MomentSequence& seq, std::size_t j, const TolerancePolicy& tol = {}) {
  return j % 2 == 0 ? schur_L(seq, j / 2, tol) : schur_Lambda(seq, j / 2, tol);
}

namespace detail {

// Projector onto the numerical null space of A (singular values <= thr count as zero).
inline CMatrix null_projector(const CMatrix& A, double thr) {
  const Eigen::Index q = A.cols();
  Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeFullV);
  CMatrix P = identity(q);
  const auto& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) P -= svd.matrixV().col(i) * svd.matrixV().col(i).adjoint();
  return P;
}

}  // namespace detail

/// Smallest j with Q_j, ..., Q_m all numerically zero, if Q_m is.
inline std::optional<std::size_t> degenerate_order(std::span<const CMatrix> Q, std::span<const double> scale,
                                                   const TolerancePolicy& tol = {}) {
  auto zero = [&](std::size_t j) { return spectral_norm(Q[j]) <= tol.psd_floor * scale[j]; };
  if (Q.empty() || !zero(Q.size() - 1)) return std::nullopt;
  std::size_t j = Q.size() - 1;
  while (j > 0 && zero(j - 1)) --j;
  return j;
}

/// Classification from a list Q_0..Q_m. `scale[j]` sets the size against which Q_j counts as zero.
inline SequenceClass classify_parameter_list(std::span<const CMatrix> Q, std::span<const double> scale,
                                             const TolerancePolicy& tol = {}) {
  SequenceClass c;
  if (Q.empty()) return c;
  const std::size_t m = Q.size() - 1;
  std::vector<bool> zero(Q.size());
  bool nonneg = true, pos = true;
  for (std::size_t j = 0; j <= m; ++j) {
    zero[j] = spectral_norm(Q[j]) <= tol.psd_floor * scale[j];
    if (zero[j]) {
      pos = false;
      continue;
    }
    if (!is_hermitian(Q[j], tol)) return c;
    nonneg = nonneg && is_nonneg_definite(Q[j], tol);
    pos = pos && is_pos_definite(Q[j], tol);
  }
  auto included = [&](std::size_t j) {
    if (zero[j + 1]) return true;
    const CMatrix P = zero[j] ? identity(Q[j].cols()) : detail::null_projector(Q[j], tol.psd_floor * scale[j]);
    return spectral_norm(Q[j + 1] * P) <= tol.rtol_identity * scale[j + 1];
  };
  bool incl = true;
  for (std::size_t j = 0; j + 2 <= m; ++j) incl = incl && included(j);
  c.in_Kgg = nonneg && incl;
  c.in_Kgge = c.in_Kgg && (m == 0 || included(m - 1));
  c.in_Kg = c.in_Kgg && pos;
  if (c.in_Kgg) c.completely_degenerate = degenerate_order(Q, scale, tol);
  return c;
}

namespace detail {

// Congruence D^{-1/2} A D^{-1/2} with D the diagonal of A; preserves inertia.
inline CMatrix equilibrate(const CMatrix& A) {
  const Eigen::Index N = A.rows();
  Eigen::VectorXd d(N);
  double dmax = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) dmax = std::max(dmax, std::abs(A(i, i).real()));
  for (Eigen::Index i = 0; i < N; ++i) {
    const double v = A(i, i).real();
    d(i) = v > 1e-300 && v > 1e-14 * dmax ? 1.0 / std::sqrt(v) : 1.0;
  }
  return d.asDiagonal() * A * d.asDiagonal();
}

inline std::vector<double> moment_scales(const MomentSequence& seq) {
  std::vector<double> sc;
  for (const auto& s : seq.moments()) sc.push_back(1.0 + spectral_norm(s));
  return sc;
}

}  // namespace detail

inline SequenceClass classify_by_definition(const MomentSequence& seq, const TolerancePolicy& tol = {}) {
  if (!seq.is_hermitian(tol)) throw Error(ErrorKind::structure, "classification needs a Hermitian sequence");
  const std::size_t m = seq.order();
  const std::size_t n = m / 2;
  std::vector<CMatrix> blocks{build_H(seq, n)};
  if (m % 2 == 1) blocks.push_back(build_K(seq, n));
  else if (n >= 1) blocks.push_back(build_K(seq, n - 1));

  bool nonneg = true, pos = true;
  for (const auto& B : blocks) {
    // Scaling would blow up noise-level diagonals of degenerate data, so only the strict test uses it.
    // The semidefinite floor is absolute-plus-relative, like the zero test below.
    const CMatrix Hb = hermitize(B);
    const Eigen::VectorXd ev = hermitian_eigenvalues(Hb);
    nonneg = nonneg && ev(0) >= -tol.psd_floor * (1.0 + ev.cwiseAbs().maxCoeff());
    pos = pos && is_pos_definite(detail::equilibrate(Hb), tol);
  }

  std::vector<CMatrix> Q;
  for (std::size_t j = 0; j <= m; ++j) Q.push_back(schur_Q(seq, j, tol));
  const SequenceClass from_params = classify_parameter_list(Q, detail::moment_scales(seq), tol);

  SequenceClass c;
  c.in_Kgg = nonneg;
  c.in_Kg = nonneg && pos;
  c.in_Kgge = nonneg && from_params.in_Kgge;
  if (nonneg) c.completely_degenerate = degenerate_order(Q, detail::moment_scales(seq), tol);
  return c;
}

}  // namespace momentforge

#endif  // MOMENTFORGE_HANKEL_HPP
