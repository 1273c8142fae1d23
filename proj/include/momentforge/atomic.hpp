#ifndef MOMENTFORGE_ATOMIC_HPP
#define MOMENTFORGE_ATOMIC_HPP

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "hankel.hpp"

namespace momentforge {

struct Atom {
  double t = 0.0;
  CMatrix w;
};

/// Finitely many point masses on [0, inf) with nonnegative Hermitian weights.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;

  AtomicMeasure(Eigen::Index q, std::vector<Atom> atoms, const TolerancePolicy& tol = {})
      : q_(q), atoms_(std::move(atoms)) {
    if (q_ < 1) throw Error(ErrorKind::dimension, "measure size q must be positive");
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.t < b.t; });
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      const Atom& a = atoms_[i];
      if (!std::isfinite(a.t) || a.t < 0.0) throw Error(ErrorKind::domain, "atom outside [0, inf)");
      if (i > 0 && a.t == atoms_[i - 1].t) throw Error(ErrorKind::domain, "repeated atom");
      if (a.w.rows() != q_ || a.w.cols() != q_) throw Error(ErrorKind::dimension, "atom weight is not q x q");
      require_finite(a.w, "atom weight");
      if (!is_nonneg_definite(a.w, tol)) throw Error(ErrorKind::structure, "atom weight not nonnegative Hermitian");
    }
  }

  Eigen::Index q() const { return q_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

 private:
  Eigen::Index q_ = 0;
  std::vector<Atom> atoms_;
};

// s_j = sum_i t_i^j w_i, j = 0..upto
inline MomentSequence measure_moments(const AtomicMeasure& mu, std::size_t upto) {
  std::vector<CMatrix> s(upto + 1, zeros(mu.q(), mu.q()));
  for (const auto& a : mu.atoms()) {
    double p = 1.0;
    for (std::size_t j = 0; j <= upto; ++j) {
      s[j] += p * a.w;
      p *= a.t;
    }
  }
  return MomentSequence(std::move(s));
}

// weights t_i w_i; atoms at 0 drop out
inline AtomicMeasure shifted_measure(const AtomicMeasure& mu) {
  std::vector<Atom> out;
  for (const auto& a : mu.atoms())
    if (a.t > 0.0) out.push_back({a.t, a.t * a.w});
  return AtomicMeasure(mu.q(), std::move(out));
}

// S(z) = sum_i w_i / (t_i - z)
inline CMatrix stieltjes_transform(const AtomicMeasure& mu, cplx z) {
  CMatrix S = zeros(mu.q(), mu.q());
  for (const auto& a : mu.atoms()) {
    const cplx d = a.t - z;
    if (std::abs(d) == 0.0) throw Error(ErrorKind::domain, "evaluation at an atom");
    S += a.w / d;
  }
  return S;
}

}  // namespace momentforge

#endif  // MOMENTFORGE_ATOMIC_HPP
