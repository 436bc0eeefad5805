#include <cmath>
#include <string>

#include <lapacke.h>

#include "qpgen/backend.hpp"
#include "qpgen/errors.hpp"
#include "qpgen/specfn.hpp"

namespace qpgen::specfn {

namespace {

void check_square(Eigen::Index rows, Eigen::Index cols, const char* who) {
  if (rows != cols) throw ContractError(std::string(who) + ": matrix must be square");
}

void check_hermitian(const CMatrix& h) {
  check_square(h.rows(), h.cols(), "hermitian_eig");
  const double scale = max_abs(h);
  double dev = 0.0;
  for (Eigen::Index j = 0; j < h.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      dev = std::max(dev, std::abs(h(i, j) - std::conj(h(j, i))));
  if (dev > 1e-10 * scale)
    throw ContractError("hermitian_eig: input is not Hermitian (max deviation " +
                        std::to_string(dev) + ")");
}

// First component above this fraction of the column maximum fixes the phase.
constexpr double kPhaseFloor = 1e-8;

void fix_phases(RMatrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const double cap = v.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > kPhaseFloor * cap) {
        if (v(i, j) < 0.0) v.col(j) *= -1.0;
        break;
      }
    }
  }
}

void fix_phases(CMatrix& v) {
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const double cap = v.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      const double a = std::abs(v(i, j));
      if (a > kPhaseFloor * cap) {
        v.col(j) *= std::conj(v(i, j)) / a;
        v(i, j) = cplx(a, 0.0);
        break;
      }
    }
  }
}

}  // namespace

RVector symmetric_eig_inplace(RMatrix& h) {
  check_square(h.rows(), h.cols(), "symmetric_eig");
  const auto n = static_cast<lapack_int>(h.rows());
  RVector w(n);
  if (n == 0) return w;
  backend::verify_eigensolver();
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, h.data(), n, w.data());
  if (info != 0) throw NumericError("dsyevd failed with info=" + std::to_string(info));
  fix_phases(h);
  return w;
}

RVector hermitian_eig_inplace(CMatrix& h) {
  check_square(h.rows(), h.cols(), "hermitian_eig");
  const auto n = static_cast<lapack_int>(h.rows());
  RVector w(n);
  if (n == 0) return w;
  backend::verify_eigensolver();
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                         reinterpret_cast<lapack_complex_double*>(h.data()), n,
                                         w.data());
  if (info != 0) throw NumericError("zheevd failed with info=" + std::to_string(info));
  fix_phases(h);
  return w;
}

RealEigenSystem symmetric_eig(const RMatrix& h) {
  RealEigenSystem out;
  out.vectors = h;
  out.values = symmetric_eig_inplace(out.vectors);
  return out;
}

EigenSystem hermitian_eig(const CMatrix& h) {
  check_hermitian(h);
  EigenSystem out;
  if (is_exactly_real(h)) {
    RMatrix re = h.real();
    out.values = symmetric_eig_inplace(re);
    out.vectors = re.cast<cplx>();
    return out;
  }
  out.vectors = h;
  out.values = hermitian_eig_inplace(out.vectors);
  return out;
}

}  // namespace qpgen::specfn
