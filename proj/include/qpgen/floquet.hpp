#pragma once

// Extended-space (Sambe) Floquet engine. The drive phase is promoted to a
// degree of freedom with conjugate photon index m in [-m_max, m_max]; the
// extended index of (alpha, m) is (m + m_max) * d + alpha.

#include <cstdint>

#include "qpgen/fourier.hpp"
#include "qpgen/linalg.hpp"

namespace qpgen::floquet {

/// Default guard on the extended dimension; large enough for the SQUID
/// profile at m_max = 40.
inline constexpr std::int64_t kDefaultDimLimit = 8100;

struct FloquetProblem {
  FourierSeries series;  // square, d x d
  double omega_d = 1.0;  // GHz
  int m_max = 1;

  int base_dim() const { return series.rows(); }
  int blocks() const { return 2 * m_max + 1; }
  std::int64_t extended_dim() const {
    return static_cast<std::int64_t>(base_dim()) * blocks();
  }
  int index(int alpha, int m) const { return (m + m_max) * base_dim() + alpha; }

  /// Throws ArgumentError on a non-square series, m_max < 1, or omega_d <= 0;
  /// ContractError when the series violates H^(-k) = H^(k)^dagger.
  void validate() const;
};

/// Complex block matrix. Throws ResourceError above `dim_limit`.
CMatrix build_floquet(const FloquetProblem& problem, std::int64_t dim_limit = kDefaultDimLimit);

/// Real block matrix; requires a real series.
RMatrix build_floquet_real(const FloquetProblem& problem,
                           std::int64_t dim_limit = kDefaultDimLimit);

/// Dressed spectrum of one Floquet problem. Eigenvectors are stored real when
/// the Floquet matrix is real.
class DressedBasis {
 public:
  DressedBasis() = default;
  DressedBasis(RVector energies, RMatrix vectors, int base_dim, int m_max, double omega_d);
  DressedBasis(RVector energies, CMatrix vectors, int base_dim, int m_max, double omega_d);

  bool is_real() const { return real_; }
  int size() const { return static_cast<int>(energies_.size()); }
  int base_dim() const { return base_dim_; }
  int m_max() const { return m_max_; }
  double omega_d() const { return omega_d_; }
  const RVector& energies() const { return energies_; }
  double energy(int j) const { return energies_(j); }

  /// Throws ContractError when the storage does not match.
  const RMatrix& real_vectors() const;
  const CMatrix& complex_vectors() const;

  CVector vector(int j) const;
  /// V^dagger x.
  CVector project(const CVector& x) const;
  /// sum_m m |block_m|^2 of eigenvector j.
  double mean_photon(int j) const;
  /// Weight of eigenvector j on blocks with |m| > m_max - guard.
  double edge_weight(int j, int guard) const;

 private:
  RVector energies_;
  RMatrix re_;
  CMatrix cx_;
  bool real_ = true;
  int base_dim_ = 0;
  int m_max_ = 0;
  double omega_d_ = 0.0;
};

/// Builds and diagonalizes; real series take the real symmetric path.
DressedBasis diagonalize(const FloquetProblem& problem,
                         std::int64_t dim_limit = kDefaultDimLimit);

/// sum_m exp(i m theta) (block m of v), a vector on the base space.
CVector project_mode(const CVector& v, int base_dim, int m_max, double theta);

}  // namespace qpgen::floquet
