#ifndef MOMENTFORGE_SCHUR_HPP
#define MOMENTFORGE_SCHUR_HPP

#include <optional>
#include <vector>

#include "parametrize.hpp"

namespace momentforge {

/// Reciprocal sequence: s#_0 = s_0^+, s#_j = -s_0^+ sum_{l<j} s_{j-l} s#_l.
inline MomentSequence reciprocal(const MomentSequence& seq, const TolerancePolicy& tol = {}) {
  const CMatrix p0 = moore_penrose(seq[0], tol);
  std::vector<CMatrix> r{p0};
  for (std::size_t j = 1; j <= seq.order(); ++j) {
    CMatrix acc = zeros(seq.q(), seq.q());
    for (std::size_t l = 0; l < j; ++l) acc += seq[j - l] * r[l];
    r.push_back(-p0 * acc);
  }
  return MomentSequence(std::move(r));
}

inline MomentSequence transform1(const MomentSequence& seq, const TolerancePolicy& tol = {}) {
  if (seq.order() < 1) throw Error(ErrorKind::length, "first transform needs at least two moments");
  const MomentSequence rec = reciprocal(seq, tol);
  const bool herm = seq.is_hermitian(tol);
  std::vector<CMatrix> out;
  for (std::size_t j = 0; j + 1 <= seq.order(); ++j) {
    CMatrix t = -seq[0] * rec[j + 1] * seq[0];
    out.push_back(herm ? hermitize(t) : t);
  }
  return MomentSequence(std::move(out));
}

inline MomentSequence transformK(const MomentSequence& seq, std::size_t k, const TolerancePolicy& tol = {}) {
  if (k > seq.order())
    throw Error(ErrorKind::length, "transform order " + std::to_string(k) + " exceeds sequence order " +
                                       std::to_string(seq.order()));
  MomentSequence cur = seq;
  for (std::size_t i = 0; i < k; ++i) cur = transform1(cur, tol);
  return cur;
}

/// max_j residual between Q_j of the k-th transform and Q_{j+k} of the sequence.
inline double transform_shift_check(const MomentSequence& seq, std::size_t k, const TolerancePolicy& tol = {}) {
  const StieltjesParam sp = sp_forward(seq, tol);
  if (!classify_from_sp(sp, tol).in_Kg)
    throw Error(ErrorKind::classification, "shift check needs a positive definite sequence");
  const StieltjesParam spk = sp_forward(transformK(seq, k, tol), tol);
  double r = 0.0;
  for (std::size_t j = 0; j < spk.params.size(); ++j) r = std::max(r, rel_residual(spk[j], sp[j + k]));
  return r;
}

struct ClassPreservation {
  SequenceClass before;
  SequenceClass after;
  bool positive_preserved = true;  // in_Kg before implies in_Kg after
  bool degenerate_order_ok = true; // order d maps to max(0, d - k)
  bool top_degenerate_ok = true;   // degenerate at top order stays degenerate at top order
  bool ok() const { return positive_preserved && degenerate_order_ok && top_degenerate_ok; }
};

inline ClassPreservation class_preservation_check(const MomentSequence& seq, std::size_t k,
                                                  const TolerancePolicy& tol = {}) {
  ClassPreservation r;
  r.before = classify_by_definition(seq, tol);
  const MomentSequence t = transformK(seq, k, tol);
  r.after = classify_by_definition(t, tol);
  if (r.before.in_Kg) r.positive_preserved = r.after.in_Kg;
  if (r.before.in_Kgg && r.before.completely_degenerate) {
    const std::size_t d = *r.before.completely_degenerate;
    const std::size_t expect = d > k ? d - k : 0;
    r.degenerate_order_ok = r.after.completely_degenerate == std::optional<std::size_t>(expect);
    r.top_degenerate_ok = r.after.completely_degenerate.has_value();
  }
  return r;
}

}  // namespace momentforge

#endif  // MOMENTFORGE_SCHUR_HPP
