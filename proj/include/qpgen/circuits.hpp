#pragma once

// Charge-basis operators and Hamiltonian builders for single-junction
// transmons and two-junction SQUIDs.
//
// Basis conventions. Index i in [0, 2N] of a sector with cutoff N carries charge
// i - N (Even) or i - N + 1/2 (Odd). exp(i phi) raises the charge by one and is
// the unit subdiagonal. The half-shift operators map Even -> Odd:
//   exp(+i phi/2): |k> -> |k + 1/2>,  matrix H+ (i, i) = 1
//   exp(-i phi/2): |k> -> |k - 1/2>,  matrix H- (i - 1, i) = 1
// so cos(phi/2) = (H+ + H-)/2 and sin(phi/2) = (H+ - H-)/(2i).

#include <array>
#include <vector>

#include "qpgen/fourier.hpp"
#include "qpgen/linalg.hpp"

namespace qpgen::circuits {

enum class Sector { Even, Odd };

struct ChargeBasis {
  Sector sector = Sector::Even;
  int cutoff = 1;

  int dim() const { return 2 * cutoff + 1; }
  double charge(int index) const;
  /// Throws ArgumentError for cutoff < 1.
  void validate() const;
};

struct ChargeBasisOperators {
  ChargeBasis basis;
  RMatrix n_op;        // diagonal charges
  RMatrix raise;       // exp(i phi)
  RMatrix cos_phi;
  CMatrix sin_phi;
  RMatrix half_raise;  // exp(+i phi/2), Odd x Even
  RMatrix half_lower;  // exp(-i phi/2), Odd x Even
  RMatrix cos_half_phi;
  CMatrix sin_half_phi;
  RMatrix identity;
};

ChargeBasisOperators build_charge_operators(const ChargeBasis& basis);

struct TransmonParams {
  double e_j = 1.0;  // GHz
  double e_c = 0.1;  // GHz
  double n_g = 0.0;

  void validate() const;
};

struct SquidParams {
  double e_j1 = 1.0;
  double e_j2 = 1.0;
  double e_c = 0.1;
  double n_g = 0.0;
  double c1 = 0.5;
  double c2 = 0.5;

  /// Throws ContractError when |c1 + c2 - 1| > 1e-12, ArgumentError otherwise.
  void validate() const;
  bool symmetric() const { return e_j1 == e_j2 && c1 == c2; }
};

/// A junction whose phase is phi + flux_coefficient * phi_e(t).
struct Junction {
  double e_j = 0.0;
  double flux_coefficient = 1.0;
};

/// phi_e(t) = phi_dc + phi_ac sin(theta).
struct FluxDrive {
  double phi_dc = 0.0;
  double phi_ac = 0.0;
};

/// 4 E_C (n - n_g)^2 in the given sector.
RMatrix charging_term(const ChargeBasis& basis, double e_c, double n_g);

/// 4 E_C (n - n_g)^2 - E_J cos(phi).
RMatrix transmon_hamiltonian(const TransmonParams& p, const ChargeBasis& basis);

/// Static SQUID at zero flux: 4 E_C (n - n_g)^2 - (E_J1 + E_J2) cos(phi).
RMatrix squid_hamiltonian(const SquidParams& p, const ChargeBasis& basis);

/// Fourier series of 4 E_C (n - n_g)^2 - sum_j E_Jj cos(phi + s_j phi_e(t)).
FourierSeries junction_drive_fourier(const ChargeBasis& basis, double e_c, double n_g,
                                     const std::vector<Junction>& junctions,
                                     const FluxDrive& drive, int k_max);

/// Charge-displaced transmon, phi_e = phi_d sin(theta). Requires k_max >= 1.
FourierSeries transmon_drive_fourier(const TransmonParams& p, const ChargeBasis& basis,
                                     double phi_d, int k_max);

/// Lab-frame charge drive H_q + Omega n cos(theta): H^(0) = H_q, H^(+-1) = Omega n / 2.
FourierSeries charge_drive_fourier(const RMatrix& h_q, const RMatrix& n_op, double omega);

/// cos(phi_j(t)/2) and sin(phi_j(t)/2) as Odd x Even Fourier series.
struct HalfAngleSeries {
  FourierSeries cos_half;
  FourierSeries sin_half;
};

HalfAngleSeries half_angle_fourier(int cutoff, double flux_coefficient, const FluxDrive& drive,
                                   int k_max);

struct JunctionOperators {
  double e_j = 0.0;
  HalfAngleSeries ops;
};

struct SquidDriveSeries {
  FourierSeries hamiltonian;
  std::array<JunctionOperators, 2> junctions;
};

/// Junction 1 carries +c1 phi_e, junction 2 carries -c2 phi_e.
SquidDriveSeries squid_drive_fourier(const SquidParams& p, const ChargeBasis& basis,
                                     double phi_dc, double phi_ac, int k_max);

/// Both parity sectors diagonalized and truncated to d levels.
struct EigenbasisOperators {
  int d = 0;
  RVector even_energies;  // d lowest, ascending
  RVector odd_energies;
  RMatrix even_vectors;   // charge basis x d
  RMatrix odd_vectors;
  RMatrix n_op;           // even sector
  RMatrix cos_phi;
  CMatrix sin_phi;
  RMatrix cos_half_phi;   // odd eigenbasis <- even eigenbasis
  CMatrix sin_half_phi;
};

/// Requires real symmetric sector Hamiltonians of equal dimension; throws
/// ArgumentError for d <= 0 or d > dim.
EigenbasisOperators to_eigenbasis(const RMatrix& h_even, const ChargeBasisOperators& ops,
                                  const RMatrix& h_odd, int d);

/// E_{J,2phi} = (4 E_C E_J^2 / omega_d^2) sum_n [J_2n(phi_ac/2)/n]^2 for the
/// symmetric SQUID. The series stops at n_terms or when a term falls below
/// 1e-14 of the running sum.
double kapitza_cos2_prefactor(const SquidParams& p, double phi_ac, double omega_d, int n_terms);

/// 4 E_C (n - n_g)^2 - 2 E_J J_0(phi_ac/2) cos(phi) - E_{J,2phi} cos(2 phi).
/// Requires a symmetric SQUID.
RMatrix effective_hamiltonian_kapitza(const SquidParams& p, const ChargeBasis& basis,
                                      double phi_ac, double omega_d, int n_terms = 64);

/// U_eff(phi) = -2 E_J J_0(phi_ac/2) cos(phi) - E_{J,2phi} cos(2 phi).
double effective_potential(const SquidParams& p, double phi_ac, double omega_d, double phi,
                           int n_terms = 64);

}  // namespace qpgen::circuits
