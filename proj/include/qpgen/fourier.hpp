#pragma once

#include <vector>

#include "qpgen/linalg.hpp"

namespace qpgen {

/// Fourier components X^(k), k in [-k_max, k_max], of a 2*pi-periodic matrix
/// function X(theta) = sum_k exp(i k theta) X^(k). Components are rows x cols;
/// rectangular series describe cross-sector transition operators.
class FourierSeries {
 public:
  FourierSeries() = default;
  FourierSeries(int rows, int cols, int k_max);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int k_max() const { return k_max_; }
  bool square() const { return rows_ == cols_; }

  /// Component k; zero matrix outside [-k_max, k_max] for the const overload.
  const CMatrix& operator[](int k) const;
  CMatrix& operator[](int k);

  /// sum_k exp(i k theta) X^(k).
  CMatrix evaluate(double theta) const;

  /// True when every component has identically zero imaginary part.
  bool is_real() const;

  /// max_k max|X^(-k) - X^(k)^dagger|; meaningful for square series.
  double closure_defect() const;

  /// Largest |k| with a component above `tol` in max-norm.
  int effective_k_max(double tol = 0.0) const;

  /// Component-wise left^T X^(k) right for real rotations.
  FourierSeries rotated(const RMatrix& left, const RMatrix& right) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int k_max_ = 0;
  std::vector<CMatrix> components_;
  CMatrix zero_;
};

}  // namespace qpgen
