#include "qpgen/fourier.hpp"

#include <cmath>

#include "qpgen/errors.hpp"

namespace qpgen {

FourierSeries::FourierSeries(int rows, int cols, int k_max)
    : rows_(rows), cols_(cols), k_max_(k_max) {
  if (rows <= 0 || cols <= 0) throw ArgumentError("FourierSeries: dimensions must be positive");
  if (k_max < 0) throw ArgumentError("FourierSeries: k_max must be >= 0");
  components_.assign(static_cast<std::size_t>(2 * k_max + 1), CMatrix::Zero(rows, cols));
  zero_ = CMatrix::Zero(rows, cols);
}

const CMatrix& FourierSeries::operator[](int k) const {
  if (k < -k_max_ || k > k_max_) return zero_;
  return components_[static_cast<std::size_t>(k + k_max_)];
}

CMatrix& FourierSeries::operator[](int k) {
  if (k < -k_max_ || k > k_max_) throw ArgumentError("FourierSeries: harmonic out of range");
  return components_[static_cast<std::size_t>(k + k_max_)];
}

CMatrix FourierSeries::evaluate(double theta) const {
  CMatrix out = CMatrix::Zero(rows_, cols_);
  for (int k = -k_max_; k <= k_max_; ++k) out += std::polar(1.0, k * theta) * (*this)[k];
  return out;
}

bool FourierSeries::is_real() const {
  for (const auto& c : components_)
    if (!is_exactly_real(c)) return false;
  return true;
}

double FourierSeries::closure_defect() const {
  if (!square()) throw ContractError("FourierSeries: closure defined for square series only");
  double worst = 0.0;
  for (int k = 0; k <= k_max_; ++k)
    worst = std::max(worst, max_abs((*this)[-k] - (*this)[k].adjoint()));
  return worst;
}

int FourierSeries::effective_k_max(double tol) const {
  for (int k = k_max_; k > 0; --k)
    if (max_abs((*this)[k]) > tol || max_abs((*this)[-k]) > tol) return k;
  return 0;
}

FourierSeries FourierSeries::rotated(const RMatrix& left, const RMatrix& right) const {
  if (left.rows() != rows_ || right.rows() != cols_)
    throw ArgumentError("FourierSeries::rotated: dimension mismatch");
  FourierSeries out(static_cast<int>(left.cols()), static_cast<int>(right.cols()), k_max_);
  for (int k = -k_max_; k <= k_max_; ++k) {
    const CMatrix& c = (*this)[k];
    if (is_exactly_real(c)) {
      out[k] = (left.transpose() * c.real() * right).cast<cplx>();
    } else {
      RMatrix re = left.transpose() * c.real() * right;
      RMatrix im = left.transpose() * c.imag() * right;
      out[k].real() = re;
      out[k].imag() = im;
    }
  }
  return out;
}

}  // namespace qpgen
