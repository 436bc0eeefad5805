#include "qpgen/kernels.hpp"

#include <algorithm>
#include <atomic>

#include <omp.h>

#include "qpgen/errors.hpp"

namespace qpgen::kernels {

namespace {

std::atomic<int> g_threads{1};

// Column chunk shared by the serial and parallel overlap kernels so both
// perform the same products in the same order.
constexpr Eigen::Index kChunk = 64;

template <typename Matrix>
void check_floquet_args(const FourierSeries& h, int m_max) {
  if (!h.square()) throw ArgumentError("assemble_floquet: series must be square");
  if (m_max < 0) throw ArgumentError("assemble_floquet: m_max must be >= 0");
}

template <typename Matrix>
void assemble_block_column(const FourierSeries& h, double omega_d, int m_max, int bm,
                           Matrix& out) {
  const int d = h.rows();
  const int nb = 2 * m_max + 1;
  const int kk = h.k_max();
  for (int bmp = std::max(0, bm - kk); bmp <= std::min(nb - 1, bm + kk); ++bmp) {
    const int k = bmp - bm;
    auto blk = out.block(static_cast<Eigen::Index>(bmp) * d, static_cast<Eigen::Index>(bm) * d, d, d);
    if constexpr (std::is_same_v<typename Matrix::Scalar, double>)
      blk = h[k].real();
    else
      blk = h[k];
  }
  const double shift = (bm - m_max) * omega_d;
  for (int a = 0; a < d; ++a) {
    const Eigen::Index i = static_cast<Eigen::Index>(bm) * d + a;
    out(i, i) += shift;
  }
}

template <typename Matrix>
void prepare(const FourierSeries& h, int m_max, Matrix& out) {
  check_floquet_args<Matrix>(h, m_max);
  if constexpr (std::is_same_v<typename Matrix::Scalar, double>)
    if (!h.is_real()) throw ContractError("assemble_floquet: real output requires a real series");
  const Eigen::Index n = static_cast<Eigen::Index>(h.rows()) * (2 * m_max + 1);
  out.setZero(n, n);
}

void apply_block_row(const FourierSeries& x, int m_max, const CVector& psi, int bmp, CVector& w) {
  const int r = x.rows();
  const int c = x.cols();
  const int nb = 2 * m_max + 1;
  const int kk = x.k_max();
  auto seg = w.segment(static_cast<Eigen::Index>(bmp) * r, r);
  for (int bm = std::max(0, bmp - kk); bm <= std::min(nb - 1, bmp + kk); ++bm)
    seg.noalias() += x[bmp - bm] * psi.segment(static_cast<Eigen::Index>(bm) * c, c);
}

void check_apply_args(const FourierSeries& x, int m_max, const CVector& psi) {
  if (m_max < 0) throw ArgumentError("apply_extended: m_max must be >= 0");
  if (psi.size() != static_cast<Eigen::Index>(x.cols()) * (2 * m_max + 1))
    throw ArgumentError("apply_extended: vector length does not match extended space");
}

template <typename Matrix>
void overlap_chunk(const Matrix& a, const Matrix& b, Eigen::Index c0, RMatrix& out) {
  const Eigen::Index nc = std::min(kChunk, b.cols() - c0);
  out.middleCols(c0, nc) = (a.adjoint() * b.middleCols(c0, nc)).cwiseAbs();
}

template <typename Matrix>
RMatrix overlap_impl(const Matrix& a, const Matrix& b, bool parallel) {
  if (a.rows() != b.rows()) throw ArgumentError("overlap_abs: row mismatch");
  RMatrix out(a.cols(), b.cols());
  const Eigen::Index chunks = (b.cols() + kChunk - 1) / kChunk;
  if (parallel) {
#pragma omp parallel for schedule(dynamic) num_threads(threads())
    for (Eigen::Index ch = 0; ch < chunks; ++ch) overlap_chunk(a, b, ch * kChunk, out);
  } else {
    for (Eigen::Index ch = 0; ch < chunks; ++ch) overlap_chunk(a, b, ch * kChunk, out);
  }
  return out;
}

}  // namespace

void set_threads(int n) { g_threads = std::max(1, n); }
int threads() { return g_threads; }

void assemble_floquet_serial(const FourierSeries& h, double omega_d, int m_max, CMatrix& out) {
  prepare(h, m_max, out);
  for (int bm = 0; bm < 2 * m_max + 1; ++bm) assemble_block_column(h, omega_d, m_max, bm, out);
}

void assemble_floquet_omp(const FourierSeries& h, double omega_d, int m_max, CMatrix& out) {
  prepare(h, m_max, out);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (int bm = 0; bm < 2 * m_max + 1; ++bm) assemble_block_column(h, omega_d, m_max, bm, out);
}

void assemble_floquet_serial(const FourierSeries& h, double omega_d, int m_max, RMatrix& out) {
  prepare(h, m_max, out);
  for (int bm = 0; bm < 2 * m_max + 1; ++bm) assemble_block_column(h, omega_d, m_max, bm, out);
}

void assemble_floquet_omp(const FourierSeries& h, double omega_d, int m_max, RMatrix& out) {
  prepare(h, m_max, out);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (int bm = 0; bm < 2 * m_max + 1; ++bm) assemble_block_column(h, omega_d, m_max, bm, out);
}

CVector apply_extended_serial(const FourierSeries& x, int m_max, const CVector& psi) {
  check_apply_args(x, m_max, psi);
  CVector w = CVector::Zero(static_cast<Eigen::Index>(x.rows()) * (2 * m_max + 1));
  for (int bmp = 0; bmp < 2 * m_max + 1; ++bmp) apply_block_row(x, m_max, psi, bmp, w);
  return w;
}

CVector apply_extended_omp(const FourierSeries& x, int m_max, const CVector& psi) {
  check_apply_args(x, m_max, psi);
  CVector w = CVector::Zero(static_cast<Eigen::Index>(x.rows()) * (2 * m_max + 1));
#pragma omp parallel for schedule(static) num_threads(threads())
  for (int bmp = 0; bmp < 2 * m_max + 1; ++bmp) apply_block_row(x, m_max, psi, bmp, w);
  return w;
}

CVector apply_extended(const FourierSeries& x, int m_max, const CVector& psi) {
  return threads() > 1 ? apply_extended_omp(x, m_max, psi) : apply_extended_serial(x, m_max, psi);
}

RMatrix overlap_abs_serial(const CMatrix& a, const CMatrix& b) { return overlap_impl(a, b, false); }
RMatrix overlap_abs_omp(const CMatrix& a, const CMatrix& b) { return overlap_impl(a, b, true); }
RMatrix overlap_abs_serial(const RMatrix& a, const RMatrix& b) { return overlap_impl(a, b, false); }
RMatrix overlap_abs_omp(const RMatrix& a, const RMatrix& b) { return overlap_impl(a, b, true); }

void map_indexed_serial(int n, const std::function<double(int)>& f, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(std::max(0, n)), 0.0);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f(i);
}

void map_indexed_omp(int n, const std::function<double(int)>& f, std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(std::max(0, n)), 0.0);
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads())
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f(i);
}

void map_indexed(int n, const std::function<double(int)>& f, std::vector<double>& out) {
  if (threads() > 1)
    map_indexed_omp(n, f, out);
  else
    map_indexed_serial(n, f, out);
}

}  // namespace qpgen::kernels
