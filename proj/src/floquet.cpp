#include "qpgen/floquet.hpp"

#include <cmath>
#include <string>

#include "qpgen/errors.hpp"
#include "qpgen/kernels.hpp"
#include "qpgen/specfn.hpp"

namespace qpgen::floquet {

namespace {

void guard_dim(const FloquetProblem& p, std::int64_t limit) {
  if (p.extended_dim() > limit)
    throw ResourceError("Floquet dimension " + std::to_string(p.extended_dim()) +
                        " exceeds limit " + std::to_string(limit));
}

}  // namespace

void FloquetProblem::validate() const {
  if (!series.square() || series.rows() <= 0)
    throw ArgumentError("FloquetProblem: series must be square and nonempty");
  if (m_max < 1) throw ArgumentError("FloquetProblem: m_max must be >= 1");
  if (!(omega_d > 0.0) || !std::isfinite(omega_d))
    throw ArgumentError("FloquetProblem: omega_d must be positive");
  double scale = 0.0;
  for (int k = -series.k_max(); k <= series.k_max(); ++k) scale = std::max(scale, max_abs(series[k]));
  if (series.closure_defect() > 1e-12 * std::max(scale, 1.0))
    throw ContractError("FloquetProblem: series violates H^(-k) = H^(k)^dagger");
}

CMatrix build_floquet(const FloquetProblem& problem, std::int64_t dim_limit) {
  problem.validate();
  guard_dim(problem, dim_limit);
  CMatrix out;
  kernels::assemble_floquet(problem.series, problem.omega_d, problem.m_max, out);
  return out;
}

RMatrix build_floquet_real(const FloquetProblem& problem, std::int64_t dim_limit) {
  problem.validate();
  guard_dim(problem, dim_limit);
  RMatrix out;
  kernels::assemble_floquet(problem.series, problem.omega_d, problem.m_max, out);
  return out;
}

DressedBasis::DressedBasis(RVector energies, RMatrix vectors, int base_dim, int m_max,
                           double omega_d)
    : energies_(std::move(energies)),
      re_(std::move(vectors)),
      real_(true),
      base_dim_(base_dim),
      m_max_(m_max),
      omega_d_(omega_d) {}

DressedBasis::DressedBasis(RVector energies, CMatrix vectors, int base_dim, int m_max,
                           double omega_d)
    : energies_(std::move(energies)),
      cx_(std::move(vectors)),
      real_(false),
      base_dim_(base_dim),
      m_max_(m_max),
      omega_d_(omega_d) {}

const RMatrix& DressedBasis::real_vectors() const {
  if (!real_) throw ContractError("DressedBasis: vectors are complex");
  return re_;
}

const CMatrix& DressedBasis::complex_vectors() const {
  if (real_) throw ContractError("DressedBasis: vectors are real");
  return cx_;
}

CVector DressedBasis::vector(int j) const {
  if (real_) return re_.col(j).cast<cplx>();
  return cx_.col(j);
}

CVector DressedBasis::project(const CVector& x) const {
  if (!real_) return cx_.adjoint() * x;
  CVector out(size());
  out.real() = re_.transpose() * x.real();
  out.imag() = re_.transpose() * x.imag();
  return out;
}

double DressedBasis::mean_photon(int j) const {
  double acc = 0.0;
  for (int b = 0; b < 2 * m_max_ + 1; ++b) {
    const Eigen::Index off = static_cast<Eigen::Index>(b) * base_dim_;
    const double w = real_ ? re_.col(j).segment(off, base_dim_).squaredNorm()
                           : cx_.col(j).segment(off, base_dim_).squaredNorm();
    acc += (b - m_max_) * w;
  }
  return acc;
}

double DressedBasis::edge_weight(int j, int guard) const {
  double acc = 0.0;
  for (int b = 0; b < 2 * m_max_ + 1; ++b) {
    if (std::abs(b - m_max_) <= m_max_ - guard) continue;
    const Eigen::Index off = static_cast<Eigen::Index>(b) * base_dim_;
    acc += real_ ? re_.col(j).segment(off, base_dim_).squaredNorm()
                 : cx_.col(j).segment(off, base_dim_).squaredNorm();
  }
  return acc;
}

DressedBasis diagonalize(const FloquetProblem& problem, std::int64_t dim_limit) {
  if (problem.series.is_real()) {
    RMatrix h = build_floquet_real(problem, dim_limit);
    RVector w = specfn::symmetric_eig_inplace(h);
    return DressedBasis(std::move(w), std::move(h), problem.base_dim(), problem.m_max,
                        problem.omega_d);
  }
  CMatrix h = build_floquet(problem, dim_limit);
  RVector w = specfn::hermitian_eig_inplace(h);
  return DressedBasis(std::move(w), std::move(h), problem.base_dim(), problem.m_max,
                      problem.omega_d);
}

CVector project_mode(const CVector& v, int base_dim, int m_max, double theta) {
  if (v.size() != static_cast<Eigen::Index>(base_dim) * (2 * m_max + 1))
    throw ArgumentError("project_mode: vector length does not match extended space");
  CVector out = CVector::Zero(base_dim);
  for (int b = 0; b < 2 * m_max + 1; ++b)
    out += std::polar(1.0, (b - m_max) * theta) *
           v.segment(static_cast<Eigen::Index>(b) * base_dim, base_dim);
  return out;
}

}  // namespace qpgen::floquet
