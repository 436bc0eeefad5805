#pragma once

// Data-parallel kernels. Each has a serial reference and an OpenMP variant with
// identical floating-point results (no cross-thread reductions); the dispatching
// entry points pick the variant from the configured thread count.

#include <functional>
#include <vector>

#include "qpgen/fourier.hpp"
#include "qpgen/linalg.hpp"

namespace qpgen::kernels {

/// Threads used by the dispatching entry points; 1 selects the serial path.
void set_threads(int n);
int threads();

/// Floquet matrix: block (m', m) = X^(m'-m) + delta_{m'm} m omega_d, m in
/// [-m_max, m_max], extended index (m + m_max) * d + alpha.
void assemble_floquet_serial(const FourierSeries& h, double omega_d, int m_max, CMatrix& out);
void assemble_floquet_omp(const FourierSeries& h, double omega_d, int m_max, CMatrix& out);
/// Real variant; requires h.is_real().
void assemble_floquet_serial(const FourierSeries& h, double omega_d, int m_max, RMatrix& out);
void assemble_floquet_omp(const FourierSeries& h, double omega_d, int m_max, RMatrix& out);

/// w_{m'} = sum_m X^(m'-m) psi_m for a (possibly rectangular) series.
CVector apply_extended_serial(const FourierSeries& x, int m_max, const CVector& psi);
CVector apply_extended_omp(const FourierSeries& x, int m_max, const CVector& psi);

/// |a^H b| entrywise (columns of a against columns of b).
RMatrix overlap_abs_serial(const CMatrix& a, const CMatrix& b);
RMatrix overlap_abs_omp(const CMatrix& a, const CMatrix& b);
RMatrix overlap_abs_serial(const RMatrix& a, const RMatrix& b);
RMatrix overlap_abs_omp(const RMatrix& a, const RMatrix& b);

/// out[i] = f(i) for i in [0, n), evaluated in any order; callers sum `out`
/// sequentially so results do not depend on the thread count.
void map_indexed_serial(int n, const std::function<double(int)>& f, std::vector<double>& out);
void map_indexed_omp(int n, const std::function<double(int)>& f, std::vector<double>& out);

template <typename Matrix>
void assemble_floquet(const FourierSeries& h, double omega_d, int m_max, Matrix& out) {
  if (threads() > 1)
    assemble_floquet_omp(h, omega_d, m_max, out);
  else
    assemble_floquet_serial(h, omega_d, m_max, out);
}

CVector apply_extended(const FourierSeries& x, int m_max, const CVector& psi);

template <typename Matrix>
RMatrix overlap_abs(const Matrix& a, const Matrix& b) {
  return threads() > 1 ? overlap_abs_omp(a, b) : overlap_abs_serial(a, b);
}

void map_indexed(int n, const std::function<double(int)>& f, std::vector<double>& out);

}  // namespace qpgen::kernels
