#pragma once

// Special functions and dense numerical kernels used throughout the library.
//
// Energies are carried as frequencies (E/h in GHz). The superconducting gap is
// stored as Delta/h, so the dimensionless pair-breaking variable is
// z = hbar*omega/Delta = f/(Delta/h).

#include <vector>

#include "qpgen/linalg.hpp"

namespace qpgen::specfn {

/// Complete elliptic integral of the first kind, parameter convention m = k^2.
/// Defined for m < 1 (negative m allowed). Throws DomainError for m >= 1.
double elliptic_K(double m);

/// Complete elliptic integral of the second kind, parameter convention m = k^2.
/// Defined for m <= 1. Throws DomainError for m > 1.
double elliptic_E(double m);

/// Bessel function of the first kind J_order(x), order >= 0.
double bessel_J(int order, double x);

/// J_k(x) for any integer k, using J_{-k} = (-1)^k J_k.
double bessel_J_signed(int order, double x);

/// J_0(x) ... J_max_order(x) from a single normalized downward recurrence.
std::vector<double> bessel_J_sequence(int max_order, double x);

enum class StructureFactorKind { Plus, Minus };

/// Superconducting gap, stored as Delta/h in GHz.
struct Gap {
  double delta_ghz = 45.0;  // 2*Delta/h = 90 GHz (bulk aluminum)

  /// Throws ArgumentError when delta is not strictly positive.
  void validate() const;
  double pair_threshold_ghz() const { return 2.0 * delta_ghz; }
};

/// Photon-assisted pair-breaking structure factor from its closed form in
/// complete elliptic integrals. Returns exactly 0 at and below 2*Delta.
///
/// With z = f/Delta, m = ((z-2)/(z+2))^2:
///   S+ = (z+2) E(m) - 4 z/(z+2) K(m)
///   S- = (z+2) E(m) - 4 K(m)
/// S+ jumps to pi at threshold, S- rises continuously from 0.
double s_ph_analytic(StructureFactorKind kind, double frequency_ghz, const Gap& gap);

/// The same structure factor from the delta-constrained double integral,
/// reduced to one dimension and integrated adaptively with the substitution
/// x = 1 + u^2 removing the inverse-square-root endpoint singularities.
/// `rel_tol` must be positive.
double s_ph_quadrature(StructureFactorKind kind, double frequency_ghz, const Gap& gap,
                       double rel_tol = 1e-12);

/// Ascending eigenvalues and orthonormal eigenvectors (columns).
struct EigenSystem {
  RVector values;
  CMatrix vectors;
};

struct RealEigenSystem {
  RVector values;
  RMatrix vectors;
};

/// Dense Hermitian eigensolver. Input must satisfy
/// max|H - H^dagger| <= 1e-10 max|H| (ContractError otherwise). Each eigenvector
/// is rotated so that its first non-negligible component is real and positive.
/// Inputs with identically zero imaginary part use the real symmetric solver.
EigenSystem hermitian_eig(const CMatrix& h);

/// Real symmetric variant; destroys nothing, copies `h`.
RealEigenSystem symmetric_eig(const RMatrix& h);

/// In-place real symmetric eigensolver: `h` is overwritten with eigenvectors.
/// Used for large Floquet matrices where a second copy does not fit.
RVector symmetric_eig_inplace(RMatrix& h);

/// In-place complex Hermitian eigensolver.
RVector hermitian_eig_inplace(CMatrix& h);

}  // namespace qpgen::specfn
