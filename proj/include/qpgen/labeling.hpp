#pragma once

// Dressed-state labeling along a drive-amplitude sweep.
//
// Every tracked product state (alpha, m) starts with the bare unit vector as
// its reference. At each sweep point the eigenvectors are assigned to
// references greedily by descending overlap |<ref|lambda>|, which crosses
// multiphoton resonances diabatically. A reference whose assigned overlap drops
// below the restart threshold is replaced by the dressed vector labeled at the
// previous point and the assignment is redone.

#include <cstdint>
#include <functional>
#include <vector>

#include "qpgen/floquet.hpp"

namespace qpgen::floquet {

struct StateLabel {
  int alpha = 0;
  int m = 0;
  bool operator==(const StateLabel&) const = default;
};

/// Labels of one sweep point, indexed like the tracked list.
struct LabelResult {
  std::vector<int> index;           // eigenvector column
  std::vector<double> overlap;      // against the current reference
  std::vector<double> bare_overlap; // against the undriven product state
  std::vector<std::uint8_t> ambiguous;
  std::vector<std::uint8_t> restarted;

  int ambiguous_count() const;
};

class Labeler {
 public:
  Labeler(int base_dim, int m_max, std::vector<StateLabel> tracked,
          double restart_threshold = 0.5, double ambiguity_tol = 1e-3);

  /// Every (alpha, m) of the extended space, alpha fastest.
  static std::vector<StateLabel> all_states(int base_dim, int m_max);

  /// Labels `basis`, advancing the cursor. The first call must be at
  /// negligible drive (every tracked bare overlap >= 0.99), otherwise
  /// ContractError.
  LabelResult step(const DressedBasis& basis);

  const std::vector<StateLabel>& tracked() const { return tracked_; }
  int position(const StateLabel& s) const;  // -1 when not tracked
  int steps() const { return steps_; }

 private:
  RMatrix overlaps(const DressedBasis& basis) const;
  LabelResult assign(const RMatrix& ov, const DressedBasis& basis) const;

  int base_dim_;
  int m_max_;
  std::vector<StateLabel> tracked_;
  double restart_threshold_;
  double ambiguity_tol_;
  CMatrix refs_;
  bool refs_real_ = true;
  CMatrix prev_;
  int steps_ = 0;
};

struct LabeledPoint {
  double amplitude = 0.0;
  RVector energies;  // dressed energy of each tracked state
  LabelResult labels;
};

struct LabeledSpectrum {
  std::vector<StateLabel> tracked;
  std::vector<LabeledPoint> points;
  std::vector<DressedBasis> bases;  // filled only when requested

  int position(const StateLabel& s) const;
};

/// Diagonalizes `make(a)` for each amplitude in order and labels the tracked
/// states. Amplitudes must start at zero drive.
LabeledSpectrum label_sweep(const std::vector<double>& amplitudes,
                            const std::function<FloquetProblem(double)>& make,
                            std::vector<StateLabel> tracked, double restart_threshold = 0.5,
                            bool keep_bases = false);

/// (E~_{e,m} - E~_{g,m}) - bare_gap for the first tracked pair (0, m), (1, m).
/// Throws ArgumentError when the pair is not tracked.
double stark_shift(const LabeledSpectrum& spectrum, std::size_t point, double bare_gap);
double stark_shift(const std::vector<StateLabel>& tracked, const RVector& energies,
                   double bare_gap);

}  // namespace qpgen::floquet
