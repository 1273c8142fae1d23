#ifndef MOMENTFORGE_PARAMETRIZE_HPP
#define MOMENTFORGE_PARAMETRIZE_HPP

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "hankel.hpp"

namespace momentforge {

/// Q_0, ..., Q_m with Q_{2k} = L_k and Q_{2k+1} = Lambda_k.
struct StieltjesParam {
  Eigen::Index q = 0;
  std::vector<CMatrix> params;

  std::size_t order() const { return params.size() - 1; }
  const CMatrix& operator[](std::size_t j) const { return params.at(j); }

  void validate() const {
    if (params.empty()) throw Error(ErrorKind::length, "empty parametrization");
    for (const auto& Q : params) {
      if (Q.rows() != q || Q.cols() != q) throw Error(ErrorKind::dimension, "parameter is not q x q");
      require_finite(Q, "parameter");
    }
  }
};

inline StieltjesParam sp_forward(const MomentSequence& seq, const TolerancePolicy& tol = {}) {
  StieltjesParam sp{seq.q(), {}};
  for (std::size_t j = 0; j <= seq.order(); ++j) sp.params.push_back(schur_Q(seq, j, tol));
  return sp;
}

namespace detail {

// Re-solve the Schur complement formula for the top moment s_j given s_0..s_{j-1}.
inline CMatrix top_moment(const std::vector<CMatrix>& s, const CMatrix& Qj, bool hermitian,
                          const TolerancePolicy& tol) {
  const std::size_t j = s.size();
  if (j < 2) return Qj;
  std::vector<CMatrix> ext = s;
  ext.push_back(zeros(Qj.rows(), Qj.cols()));
  const MomentSequence tmp(std::move(ext));
  // With s_j = 0 the Schur complement is -(correction); add Q_j back.
  CMatrix sj = Qj - schur_Q(tmp, j, tol);
  return hermitian ? hermitize(sj) : sj;
}

}  // namespace detail

/// Extends the prefix s_0..s_{k-1} by the moments whose parameters are Q_k, ..., in order.
inline MomentSequence extend_by_params(std::vector<CMatrix> prefix, std::span<const CMatrix> more,
                                       const TolerancePolicy& tol = {}) {
  bool herm = true;
  for (const auto& s : prefix) herm = herm && is_hermitian(s, tol);
  for (const auto& Q : more) {
    herm = herm && is_hermitian(Q, tol);
    CMatrix sj = detail::top_moment(prefix, Q, herm, tol);
    prefix.push_back(std::move(sj));
  }
  return MomentSequence(std::move(prefix));
}

inline MomentSequence sp_inverse(const StieltjesParam& sp, const TolerancePolicy& tol = {}) {
  sp.validate();
  return extend_by_params({}, sp.params, tol);
}

inline SequenceClass classify_from_sp(const StieltjesParam& sp, const TolerancePolicy& tol = {}) {
  double big = 0.0;
  for (const auto& Q : sp.params) big = std::max(big, spectral_norm(Q));
  const std::vector<double> scale(sp.params.size(), 1.0 + big);
  return classify_parameter_list(sp.params, scale, tol);
}

/// First upto+1 moments of the sequence whose parametrization continues with zeros.
inline MomentSequence zero_extension(const MomentSequence& seq, std::size_t upto, const TolerancePolicy& tol = {}) {
  if (upto <= seq.order()) return seq.truncated(upto);
  const StieltjesParam sp = sp_forward(seq, tol);
  std::vector<double> scale;
  for (const auto& s : seq.moments()) scale.push_back(1.0 + spectral_norm(s));
  if (!seq.is_hermitian(tol) || !classify_parameter_list(sp.params, scale, tol).in_Kgge)
    throw Error(ErrorKind::classification, "zero extension needs an extendable nonnegative definite sequence");
  const std::vector<CMatrix> pad(upto - seq.order(), zeros(seq.q(), seq.q()));
  return extend_by_params(seq.moments(), pad, tol);
}

/// Random Stieltjes positive definite sequence. Each Q_j = scale * (I/2 + c B B^* / |B B^*|), c in [0, 1.5].
inline MomentSequence random_spd_sequence(Eigen::Index q, std::size_t m, std::uint64_t seed, double scale = 1.0) {
  if (q < 1) throw Error(ErrorKind::dimension, "q must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.5);
  StieltjesParam sp{q, {}};
  for (std::size_t j = 0; j <= m; ++j) {
    CMatrix B(q, q);
    for (Eigen::Index i = 0; i < B.size(); ++i) B.data()[i] = cplx(gauss(rng), gauss(rng));
    const CMatrix G = B * B.adjoint();
    const double c = unif(rng);
    sp.params.push_back(scale * hermitize(0.5 * identity(q) + c * G / spectral_norm(G)));
  }
  return sp_inverse(sp);
}

}  // namespace momentforge

#endif  // MOMENTFORGE_PARAMETRIZE_HPP
