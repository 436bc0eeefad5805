#pragma once

// Sweep orchestration: charge-driven transmon maps and constant-Stark cuts,
// detuned readout, and the flux-driven symmetric SQUID.

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qpgen/circuits.hpp"
#include "qpgen/floquet.hpp"
#include "qpgen/labeling.hpp"
#include "qpgen/rates.hpp"

namespace qpgen::scenarios {

struct Numerics {
  int charge_cutoff = 50;  // N_c, states -N_c..N_c per sector
  int levels = 20;         // d kept after rotating to the eigenbasis
  int m_max = 15;
  int k_max = 0;           // 0 picks min(2 m_max, ceil|amplitude| + 24)
  int m_guard = 5;
  int m_initial = -1;      // initial photon index; < 0 picks ceil(m_max/2)
  double edge_tolerance = 1e-5;  // unlabeled finals with more edge weight are dropped
  double restart_threshold = 0.5;
  double label_step = 0.02;  // largest amplitude increment between labeled points
  std::int64_t dim_limit = floquet::kDefaultDimLimit;

  void validate() const;
  int m0() const { return m_initial >= 0 ? m_initial : (m_max + 1) / 2; }
  int harmonics(double amplitude) const;
  rates::RateOptions rate_options() const;
};

Numerics transmon_profile(bool ci);
Numerics readout_profile(bool ci);
Numerics squid_profile(bool ci);

/// Transmon in its truncated eigenbasis, driven through the junction phase
/// (charge-displaced frame) or through the charge operator (lab frame).
class TransmonDrive {
 public:
  TransmonDrive(const circuits::TransmonParams& p, const Numerics& num);

  const circuits::EigenbasisOperators& eig() const { return eig_; }
  const circuits::TransmonParams& params() const { return p_; }
  const Numerics& numerics() const { return num_; }
  /// E_e - E_g of the even sector.
  double bare_gap() const;

  /// Floquet problem of -E_J cos(phi + phi_d sin(theta)) in one sector. At
  /// phi_d = 0 the matrix is exactly diagonal.
  floquet::FloquetProblem displaced_problem(circuits::Sector sector, double phi_d,
                                            double omega_d) const;
  /// Even-sector H_q + Omega n cos(theta).
  floquet::FloquetProblem lab_problem(double omega, double omega_d) const;
  std::vector<rates::TransitionOperators> operators(double phi_d) const;

 private:
  circuits::TransmonParams p_;
  Numerics num_;
  circuits::ChargeBasis even_basis_;
  circuits::ChargeBasis odd_basis_;
  circuits::EigenbasisOperators eig_;
  RMatrix even_static_;  // rotated undriven Hamiltonian from the series builder
  RMatrix odd_static_;
};

/// Follows labeled dressed states of one sector along an amplitude ramp.
class SectorTracker {
 public:
  using Factory = std::function<floquet::FloquetProblem(double)>;

  /// Diagonalizes and labels at amplitude 0.
  SectorTracker(Factory make, std::vector<floquet::StateLabel> tracked, double restart_threshold,
                double max_step, std::int64_t dim_limit);

  /// Moves to amplitude `a`, labeling intermediate points no more than
  /// max_step apart.
  void advance(double a);

  double amplitude() const { return amplitude_; }
  const floquet::DressedBasis& basis() const { return basis_; }
  const floquet::LabelResult& labels() const { return labels_; }
  const std::vector<floquet::StateLabel>& tracked() const { return labeler_.tracked(); }
  int column(const floquet::StateLabel& s) const;
  double energy(const floquet::StateLabel& s) const;
  bool ambiguous(const floquet::StateLabel& s) const;
  int ambiguous_seen() const { return ambiguous_seen_; }
  int restarts() const { return restarts_; }

 private:
  void label_at(double a);

  Factory make_;
  floquet::Labeler labeler_;
  double max_step_;
  std::int64_t dim_limit_;
  double amplitude_ = 0.0;
  floquet::DressedBasis basis_;
  floquet::LabelResult labels_;
  int ambiguous_seen_ = 0;
  int restarts_ = 0;
};

struct StateRates {
  std::string name;
  int alpha = 0;
  bool present = true;
  rates::ChannelSet channels;
  rates::ParitySummary summary;
  double xqp = 0.0;
  double quasienergy = std::numeric_limits<double>::quiet_NaN();  // E~ - m0 omega_d
  std::vector<std::string> flags;
};

struct PointResult {
  int grid_index = 0;
  double omega_d = 0.0;    // GHz
  double amplitude = 0.0;  // scenario axis: Omega (GHz), nbar, or phi_ac (rad)
  double phi = 0.0;        // dimensionless phase amplitude used
  double stark_shift = std::numeric_limits<double>::quiet_NaN();
  std::vector<StateRates> states;
  std::vector<std::string> flags;
  bool skipped = false;

  const StateRates* state(const std::string& name) const;
};

using RateTable = std::vector<PointResult>;

/// Gamma_g (and Gamma_e when requested) over omega_d x Omega with
/// phi_d = Omega / omega_d. grid_index = i_omega_d * |Omega| + i_Omega.
RateTable charge_drive_map(const circuits::TransmonParams& p, const Numerics& num,
                           const rates::QpEnvironment& env, const std::vector<double>& omega_d,
                           const std::vector<double>& drive_amplitude, bool include_excited);

/// Per omega_d: solves |delta_ac| = target by ramp and bisection (1 kHz), then
/// evaluates rates out of g and e.
RateTable constant_stark_cut(const circuits::TransmonParams& p, const Numerics& num,
                             const rates::QpEnvironment& env, double delta_target,
                             const std::vector<double>& omega_d);

/// chi(g) = -8 E_C g^2 w_r^2 / ((w_r^2 - E_ge^2)(w_r^2 - E_ef^2)).
double dispersive_shift(const circuits::TransmonParams& p, int cutoff, double omega_r, double g);

/// g with |chi(g)| = chi_target. Throws ArgumentError within 1 MHz of a pole.
double solve_readout_coupling(const circuits::TransmonParams& p, int cutoff, double omega_r,
                              double chi_target);

/// Resonant readout, phi_d = 2 g sqrt(nbar) / omega_r. The nbar grid must be
/// ascending; labeling starts from zero drive.
RateTable readout_sweep(const circuits::TransmonParams& p, const Numerics& num,
                        const rates::QpEnvironment& env, double omega_r, double chi_target,
                        const std::vector<double>& nbar);

/// Effective-Hamiltonian states used to identify dressed well states.
struct WellState {
  std::string name;   // g0, e0, gpi, epi
  bool present = false;
  double energy = 0.0;
  RVector vector;     // even charge basis
};

/// g0/e0 (0 well) and gpi/epi (pi well) bound states of the Kapitza
/// Hamiltonian, localized within near-degenerate pairs.
std::vector<WellState> kapitza_well_states(const circuits::SquidParams& p, int cutoff,
                                           double phi_ac, double omega_d);

/// Symmetric SQUID, phi_dc = 0, n_g = 0. Rates are summed over both junctions
/// with per-junction channels kept.
RateTable kapitza_sweep(const circuits::SquidParams& p, const Numerics& num,
                        const rates::QpEnvironment& env, double omega_d,
                        const std::vector<double>& phi_ac);

/// Fixed-amplitude point used by the convergence audit.
struct AuditPoint {
  enum class Kind { Transmon, Squid } kind = Kind::Transmon;
  circuits::TransmonParams transmon;
  circuits::SquidParams squid;
  double omega_d = 1.0;
  double amplitude = 0.0;  // phi_d (transmon) or phi_ac (SQUID)
};

struct AuditLevel {
  Numerics numerics;
  std::vector<double> gamma;   // per tracked initial state
  std::vector<double> energy;  // dressed energy minus m0 omega_d
  bool truncation_warning = false;
};

struct ConvergenceReport {
  std::vector<AuditLevel> levels;
  double gamma_drift = 0.0;   // relative, last two levels
  double energy_drift = 0.0;  // |dE| / omega_d, last two levels
  double threshold = 1e-4;
  bool pass = false;
};

/// Reruns `point` at each numerics level (ascending truncation).
ConvergenceReport convergence_audit(const AuditPoint& point, const std::vector<Numerics>& levels,
                                    const rates::QpEnvironment& env, double threshold = 1e-4);

}  // namespace qpgen::scenarios
