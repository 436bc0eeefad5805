#pragma once

// Floquet golden-rule rates for photon-assisted pair breaking and drive-
// modified quasiparticle tunneling.
//
// Matrix elements connect an even-sector dressed state (alpha, m0) to odd-sector
// dressed states (beta, m0 - n) through the extended half-angle operators.
// Frequencies are E/h in GHz; rates are in 1/s.

#include <functional>
#include <limits>
#include <cstdint>
#include <map>
#include <vector>

#include "qpgen/floquet.hpp"
#include "qpgen/fourier.hpp"
#include "qpgen/labeling.hpp"
#include "qpgen/specfn.hpp"

namespace qpgen::rates {

struct QpEnvironment {
  specfn::Gap gap;
  double n_cp = 2e6;             // Cooper pairs in the island
  double c_r = 1.0 / 120e-9;     // recombination rate, 1/s

  void validate() const;
};

/// 16 E_J / h in 1/s for E_J given in GHz.
double gamma_ph(double e_j_ghz);

/// cos(phi_j(t)/2) and sin(phi_j(t)/2) of one junction, Odd x Even series in
/// the bases used by the two Floquet problems.
struct TransitionOperators {
  int junction = 1;
  double e_j = 0.0;
  FourierSeries cos_half;
  FourierSeries sin_half;
};

struct InitialState {
  int alpha = 0;
  int m0 = 0;
  int column = 0;  // eigenvector index in the even-sector basis
  bool ambiguous = false;
};

/// Label of an odd-sector eigenvector. beta = -1 marks an unlabeled state
/// placed in the photon ladder by its mean photon index.
struct FinalState {
  int beta = -1;
  int m = 0;
  bool ambiguous = false;
};

struct Channel {
  int alpha = 0;
  int beta = -1;
  int n = 0;
  int junction = 0;
  double omega = 0.0;  // GHz; for unlabeled finals the rate-weighted mean
  double gamma = 0.0;  // 1/s
  bool ambiguous = false;
};

struct RateOptions {
  int m_guard = 5;
  double warn_fraction = 1e-6;
  int warn_margin = 2;
};

struct ChannelSet {
  int alpha = 0;
  std::vector<Channel> channels;  // nonzero, sorted by (beta, n, junction)
  int n_max = 0;
  bool truncation_warning = false;
  bool ambiguous = false;
};

/// All pair-breaking channels out of `init`. Final states outside the interior
/// window |m| <= m_max - m_guard are skipped. Channels with n <= 0 above the
/// pair-breaking threshold raise NumericError.
ChannelSet pair_breaking_channels(const floquet::DressedBasis& even, const InitialState& init,
                                  const floquet::DressedBasis& odd,
                                  const std::vector<FinalState>& finals,
                                  const std::vector<TransitionOperators>& ops,
                                  const QpEnvironment& env, const RateOptions& opt = {});

/// Gamma_{alpha beta}^(n) summed over junctions (or one junction when
/// `junction` > 0).
double pair_breaking_rate_n(const ChannelSet& set, int beta, int n, int junction = 0);

/// Gamma_{alpha beta} = sum_n Gamma_{alpha beta}^(n); `per_n` receives the
/// breakdown when non-null.
double total_rate(const ChannelSet& set, int beta, std::map<int, double>* per_n = nullptr,
                  int junction = 0);

struct ParitySummary {
  int alpha = 0;
  double gamma = 0.0;
  double lifetime = std::numeric_limits<double>::infinity();
  std::map<int, double> by_final;  // beta -> Gamma_{alpha beta}
};

ParitySummary parity_summary(const ChannelSet& set);

/// sqrt(gamma / (n_cp c_r)).
double steady_state_xqp(double gamma, double n_cp = 2e6, double c_r = 1.0 / 120e-9);

using StructureFactor = std::function<double(double omega_ghz)>;

/// Drive-modified QP tunneling: sum over n of
/// 16 E_J/h [|<beta, m0+n|cos|alpha, m0>|^2 S_qp-(w) + |<..|sin|..>|^2 S_qp+(w)]
/// with w = E~_final - E~_initial. beta < 0 sums all final states.
double qp_tunneling_rate(const floquet::DressedBasis& even, const InitialState& init,
                         const floquet::DressedBasis& odd, const std::vector<FinalState>& finals,
                         const std::vector<TransitionOperators>& ops, int beta,
                         const StructureFactor& s_qp_plus, const StructureFactor& s_qp_minus,
                         const RateOptions& opt = {});

/// Final-state labels from a full odd-sector labeling: column -> (beta, m).
std::vector<FinalState> finals_from_labels(const std::vector<floquet::StateLabel>& tracked,
                                           const std::vector<int>& index,
                                           const std::vector<std::uint8_t>& ambiguous,
                                           int columns);

/// Unlabeled finals placed by rounded mean photon index. States with more
/// than `edge_tolerance` weight outside |m| <= m_max - m_guard are left
/// unplaced.
std::vector<FinalState> finals_by_photon_index(const floquet::DressedBasis& odd, int m_guard = 0,
                                               double edge_tolerance = 1.0);

}  // namespace qpgen::rates
