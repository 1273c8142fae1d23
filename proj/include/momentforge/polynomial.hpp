#ifndef MOMENTFORGE_POLYNOMIAL_HPP
#define MOMENTFORGE_POLYNOMIAL_HPP

#include <utility>
#include <vector>

#include "matkit.hpp"

namespace momentforge {

/// Matrix polynomial P(z) = sum_j z^j A_j with explicit coefficients.
class MatrixPoly {
 public:
  MatrixPoly() = default;

  MatrixPoly(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {}

  explicit MatrixPoly(std::vector<CMatrix> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw Error(ErrorKind::length, "polynomial needs at least one coefficient");
    rows_ = coeffs_.front().rows();
    cols_ = coeffs_.front().cols();
    for (const auto& c : coeffs_) {
      if (c.rows() != rows_ || c.cols() != cols_)
        throw Error(ErrorKind::dimension, "polynomial coefficients differ in shape");
      require_finite(c, "polynomial coefficient");
    }
  }

  static MatrixPoly constant(const CMatrix& A) { return MatrixPoly(std::vector<CMatrix>{A}); }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  const std::vector<CMatrix>& coeffs() const { return coeffs_; }

  // z^j coefficient; zero past the stored length
  CMatrix coeff(std::size_t j) const {
    return j < coeffs_.size() ? coeffs_[j] : zeros(rows_, cols_);
  }

  /// Largest j with A_j nonzero (entries above `atol`); -1 for the zero polynomial.
  int degree(double atol = 0.0) const {
    for (int j = static_cast<int>(coeffs_.size()) - 1; j >= 0; --j)
      if (max_abs(coeffs_[j]) > atol) return j;
    return -1;
  }

  CMatrix leading(double atol = 0.0) const {
    const int d = degree(atol);
    return d < 0 ? zeros(rows_, cols_) : coeffs_[d];
  }

  CMatrix operator()(cplx z) const {
    CMatrix acc = zeros(rows_, cols_);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = z * acc + *it;
    return acc;
  }

  MatrixPoly& operator+=(const MatrixPoly& o) {
    check_shape(o);
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), zeros(rows_, cols_));
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) coeffs_[j] += o.coeffs_[j];
    return *this;
  }

  MatrixPoly operator-() const {
    MatrixPoly r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  // z * P(z)
  MatrixPoly times_z() const {
    MatrixPoly r(rows_, cols_);
    r.coeffs_.reserve(coeffs_.size() + 1);
    r.coeffs_.push_back(zeros(rows_, cols_));
    for (const auto& c : coeffs_) r.coeffs_.push_back(c);
    return r;
  }

  // C * P(z) and P(z) * C for constant C
  MatrixPoly left_mul(const CMatrix& C) const {
    MatrixPoly r(C.rows(), cols_);
    for (const auto& c : coeffs_) r.coeffs_.push_back(C * c);
    return r;
  }
  MatrixPoly right_mul(const CMatrix& C) const {
    MatrixPoly r(rows_, C.cols());
    for (const auto& c : coeffs_) r.coeffs_.push_back(c * C);
    return r;
  }

  // Stacked coefficient column (A_0; ...; A_n), zero-padded to n+1 blocks.
  CMatrix stacked(std::size_t n) const {
    CMatrix Y = zeros(static_cast<Eigen::Index>(n + 1) * rows_, cols_);
    for (std::size_t j = 0; j <= n; ++j) Y.middleRows(static_cast<Eigen::Index>(j) * rows_, rows_) = coeff(j);
    return Y;
  }

 private:
  void check_shape(const MatrixPoly& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw Error(ErrorKind::dimension, "polynomial shape mismatch");
  }

  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<CMatrix> coeffs_;
};

inline MatrixPoly operator+(MatrixPoly a, const MatrixPoly& b) { return a += b; }
inline MatrixPoly operator-(MatrixPoly a, const MatrixPoly& b) { return a += -b; }

/// Assemble a 2x2 block polynomial from four equally sized blocks.
inline MatrixPoly block2x2(const MatrixPoly& a, const MatrixPoly& b, const MatrixPoly& c, const MatrixPoly& d) {
  const Eigen::Index q = a.rows();
  const std::size_t len = std::max({a.coeffs().size(), b.coeffs().size(), c.coeffs().size(), d.coeffs().size()});
  std::vector<CMatrix> out;
  for (std::size_t j = 0; j < len; ++j) {
    CMatrix U(2 * q, 2 * q);
    U << a.coeff(j), b.coeff(j), c.coeff(j), d.coeff(j);
    out.push_back(std::move(U));
  }
  return MatrixPoly(std::move(out));
}

inline MatrixPoly block_of(const MatrixPoly& P, Eigen::Index bi, Eigen::Index bj, Eigen::Index q) {
  std::vector<CMatrix> out;
  for (const auto& c : P.coeffs()) out.push_back(c.block(bi * q, bj * q, q, q));
  return MatrixPoly(std::move(out));
}

}  // namespace momentforge

#endif  // MOMENTFORGE_POLYNOMIAL_HPP
