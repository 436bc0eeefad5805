#include "qpgen/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <string>
#include <utility>

#include "qpgen/errors.hpp"
#include "qpgen/kernels.hpp"
#include "qpgen/specfn.hpp"

namespace qpgen::scenarios {

using circuits::Sector;
using floquet::StateLabel;

namespace {

constexpr double kStarkTolerance = 1e-6;   // GHz
constexpr double kStarkPhiLimit = 3.0;     // no bracket beyond this phi_d
constexpr double kClusterGap = 1e-4;       // GHz, near-degenerate Kapitza pairs
constexpr double kLowOverlap = 0.5;

void add_flag(std::vector<std::string>& flags, const std::string& f) {
  if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
}

/// Runs body(i) for i in [0, n) across worker threads; the first exception is
/// rethrown after the loop.
template <class F>
void parallel_points(int n, F&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic) num_threads(kernels::threads())
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

StateRates finish_state(std::string name, int alpha, rates::ChannelSet set,
                        const rates::QpEnvironment& env) {
  StateRates s;
  s.name = std::move(name);
  s.alpha = alpha;
  s.summary = rates::parity_summary(set);
  s.xqp = rates::steady_state_xqp(s.summary.gamma, env.n_cp, env.c_r);
  if (set.truncation_warning) add_flag(s.flags, "truncation");
  if (set.ambiguous) add_flag(s.flags, "ambiguous");
  s.channels = std::move(set);
  return s;
}

/// Rates out of the tracked (alpha, m0) states of a transmon point.
std::vector<StateRates> transmon_rates(const SectorTracker& even, const SectorTracker& odd,
                                       const std::vector<rates::TransitionOperators>& ops,
                                       const std::vector<std::pair<std::string, int>>& states,
                                       const Numerics& num, const rates::QpEnvironment& env) {
  const auto finals = rates::finals_from_labels(odd.tracked(), odd.labels().index,
                                                odd.labels().ambiguous, odd.basis().size());
  const int m0 = num.m0();
  std::vector<StateRates> out;
  for (const auto& [name, alpha] : states) {
    const StateLabel label{alpha, m0};
    rates::InitialState init{alpha, m0, even.column(label), even.ambiguous(label)};
    auto set = rates::pair_breaking_channels(even.basis(), init, odd.basis(), finals, ops, env,
                                             num.rate_options());
    StateRates s = finish_state(name, alpha, std::move(set), env);
    s.quasienergy = even.energy(label) - m0 * even.basis().omega_d();
    out.push_back(std::move(s));
  }
  return out;
}

void tracker_flags(const SectorTracker& t, std::vector<std::string>& flags) {
  if (t.restarts() > 0) add_flag(flags, "restarted");
}

std::vector<StateLabel> initial_labels(const Numerics& num) {
  return {{0, num.m0()}, {1, num.m0()}};
}

double tracker_stark(const SectorTracker& t, double bare_gap, int m0) {
  return t.energy({1, m0}) - t.energy({0, m0}) - bare_gap;
}

}  // namespace

// ---------------------------------------------------------------------------

void Numerics::validate() const {
  if (charge_cutoff < 1) throw ArgumentError("numerics: charge_cutoff must be >= 1");
  if (levels < 2 || levels > 2 * charge_cutoff + 1)
    throw ArgumentError("numerics: levels must lie in [2, 2 charge_cutoff + 1]");
  if (m_max < 1) throw ArgumentError("numerics: m_max must be >= 1");
  if (k_max < 0) throw ArgumentError("numerics: k_max must be >= 0");
  if (m_initial > m_max) throw ArgumentError("numerics: m_initial must not exceed m_max");
  if (m_guard < 0 || m_guard > m_max - m0())
    throw ArgumentError("numerics: m_guard must leave the initial photon index inside the window");
  if (!(restart_threshold > 0.0 && restart_threshold < 1.0))
    throw ArgumentError("numerics: restart_threshold must lie in (0, 1)");
  if (!(label_step > 0.0)) throw ArgumentError("numerics: label_step must be positive");
  if (!(edge_tolerance > 0.0)) throw ArgumentError("numerics: edge_tolerance must be positive");
  if (dim_limit < 1) throw ArgumentError("numerics: dim_limit must be positive");
  // Drive Fourier components live densely in the charge basis before projection.
  const double n = 2.0 * charge_cutoff + 1.0;
  const double harm = 2.0 * (k_max > 0 ? k_max : 2 * m_max) + 1.0;
  if (n > static_cast<double>(dim_limit) ||
      harm * n * n > static_cast<double>(dim_limit) * static_cast<double>(dim_limit))
    throw ResourceError("numerics: charge_cutoff " + std::to_string(charge_cutoff) +
                        " with up to " + std::to_string(static_cast<int>(harm)) +
                        " harmonics exceeds dim_limit " + std::to_string(dim_limit));
}

int Numerics::harmonics(double amplitude) const {
  if (k_max > 0) return k_max;
  const int need = static_cast<int>(std::ceil(std::abs(amplitude))) + 24;
  return std::max(1, std::min(2 * m_max, need));
}

rates::RateOptions Numerics::rate_options() const {
  rates::RateOptions o;
  o.m_guard = m_guard;
  return o;
}

Numerics transmon_profile(bool ci) {
  Numerics n;
  if (ci) {
    n.charge_cutoff = 20;
    n.levels = 12;
    n.m_max = 10;
  }
  return n;
}

Numerics readout_profile(bool ci) {
  Numerics n = transmon_profile(ci);
  if (!ci) n.levels = 30;
  return n;
}

Numerics squid_profile(bool ci) {
  Numerics n;
  n.charge_cutoff = ci ? 20 : 49;
  n.levels = 2 * n.charge_cutoff + 1;
  n.m_max = 35;
  // Dressed well states spread over about +-20 photons; keep the initial
  // replica and its n ~ 10 partners clear of both edges.
  n.m_initial = 5;
  return n;
}

// ---------------------------------------------------------------------------

TransmonDrive::TransmonDrive(const circuits::TransmonParams& p, const Numerics& num)
    : p_(p), num_(num) {
  p_.validate();
  num_.validate();
  even_basis_ = {Sector::Even, num_.charge_cutoff};
  odd_basis_ = {Sector::Odd, num_.charge_cutoff};
  const auto ops = circuits::build_charge_operators(even_basis_);
  const RMatrix h_even = circuits::transmon_hamiltonian(p_, even_basis_);
  const RMatrix h_odd = circuits::transmon_hamiltonian(p_, odd_basis_);
  eig_ = circuits::to_eigenbasis(h_even, ops, h_odd, num_.levels);
  even_static_ = circuits::transmon_drive_fourier(p_, even_basis_, 0.0, 1)
                     .rotated(eig_.even_vectors, eig_.even_vectors)[0]
                     .real();
  odd_static_ = circuits::transmon_drive_fourier(p_, odd_basis_, 0.0, 1)
                    .rotated(eig_.odd_vectors, eig_.odd_vectors)[0]
                    .real();
}

double TransmonDrive::bare_gap() const { return eig_.even_energies(1) - eig_.even_energies(0); }

floquet::FloquetProblem TransmonDrive::displaced_problem(Sector sector, double phi_d,
                                                         double omega_d) const {
  const bool even = sector == Sector::Even;
  const RMatrix& v = even ? eig_.even_vectors : eig_.odd_vectors;
  const RVector& e = even ? eig_.even_energies : eig_.odd_energies;
  const RMatrix& stat = even ? even_static_ : odd_static_;
  const int k = num_.harmonics(phi_d);
  FourierSeries s =
      circuits::transmon_drive_fourier(p_, even ? even_basis_ : odd_basis_, phi_d, k).rotated(v, v);
  // Replace the rounded rotation of the static part by the exact spectrum.
  RMatrix h0 = s[0].real() - stat;
  h0.diagonal() += e;
  s[0] = h0.cast<cplx>();
  return {std::move(s), omega_d, num_.m_max};
}

floquet::FloquetProblem TransmonDrive::lab_problem(double omega, double omega_d) const {
  const RMatrix h = eig_.even_energies.asDiagonal();
  return {circuits::charge_drive_fourier(h, eig_.n_op, omega), omega_d, num_.m_max};
}

std::vector<rates::TransitionOperators> TransmonDrive::operators(double phi_d) const {
  const auto h = circuits::half_angle_fourier(num_.charge_cutoff, 1.0, {0.0, phi_d},
                                              num_.harmonics(phi_d));
  rates::TransitionOperators op;
  op.junction = 1;
  op.e_j = p_.e_j;
  op.cos_half = h.cos_half.rotated(eig_.odd_vectors, eig_.even_vectors);
  op.sin_half = h.sin_half.rotated(eig_.odd_vectors, eig_.even_vectors);
  return {std::move(op)};
}

// ---------------------------------------------------------------------------

namespace {

floquet::Labeler make_labeler(const SectorTracker::Factory& make,
                              std::vector<StateLabel> tracked, double restart_threshold) {
  const floquet::FloquetProblem p0 = make(0.0);
  return floquet::Labeler(p0.base_dim(), p0.m_max, std::move(tracked), restart_threshold);
}

}  // namespace

SectorTracker::SectorTracker(Factory make, std::vector<StateLabel> tracked,
                             double restart_threshold, double max_step, std::int64_t dim_limit)
    : make_(std::move(make)),
      labeler_(make_labeler(make_, std::move(tracked), restart_threshold)),
      max_step_(max_step),
      dim_limit_(dim_limit) {
  if (!(max_step > 0.0)) throw ArgumentError("SectorTracker: max_step must be positive");
  label_at(0.0);
}

void SectorTracker::label_at(double a) {
  basis_ = floquet::diagonalize(make_(a), dim_limit_);
  labels_ = labeler_.step(basis_);
  amplitude_ = a;
  ambiguous_seen_ += labels_.ambiguous_count();
  for (auto r : labels_.restarted) restarts_ += r;
}

void SectorTracker::advance(double a) {
  const double a0 = amplitude_;
  const int steps = static_cast<int>(std::ceil(std::abs(a - a0) / max_step_ - 1e-12));
  if (steps == 0) {
    if (a != a0) label_at(a);
    return;
  }
  for (int i = 1; i <= steps; ++i) label_at(i == steps ? a : a0 + (a - a0) * i / steps);
}

int SectorTracker::column(const StateLabel& s) const {
  const int t = labeler_.position(s);
  if (t < 0) throw ArgumentError("SectorTracker: state is not tracked");
  return labels_.index[static_cast<std::size_t>(t)];
}

double SectorTracker::energy(const StateLabel& s) const { return basis_.energy(column(s)); }

bool SectorTracker::ambiguous(const StateLabel& s) const {
  const int t = labeler_.position(s);
  if (t < 0) throw ArgumentError("SectorTracker: state is not tracked");
  return labels_.ambiguous[static_cast<std::size_t>(t)] != 0;
}

const StateRates* PointResult::state(const std::string& name) const {
  for (const auto& s : states)
    if (s.name == name) return &s;
  return nullptr;
}

// ---------------------------------------------------------------------------

RateTable charge_drive_map(const circuits::TransmonParams& p, const Numerics& num,
                           const rates::QpEnvironment& env, const std::vector<double>& omega_d,
                           const std::vector<double>& drive_amplitude, bool include_excited) {
  env.validate();
  if (omega_d.empty() || drive_amplitude.empty())
    throw ArgumentError("charge_drive_map: empty grid");
  for (double w : omega_d)
    if (!(w > 0.0)) throw ArgumentError("charge_drive_map: omega_d must be positive");
  for (double a : drive_amplitude)
    if (!(a >= 0.0)) throw ArgumentError("charge_drive_map: drive amplitude must be >= 0");

  const TransmonDrive drive(p, num);
  const int na = static_cast<int>(drive_amplitude.size());
  RateTable table(omega_d.size() * drive_amplitude.size());
  std::vector<std::pair<std::string, int>> states{{"g", 0}};
  if (include_excited) states.push_back({"e", 1});

  parallel_points(static_cast<int>(omega_d.size()), [&](int i) {
    const double w = omega_d[static_cast<std::size_t>(i)];
    const double step = num.label_step * w;
    SectorTracker even(
        [&](double a) { return drive.displaced_problem(Sector::Even, a / w, w); },
        initial_labels(num), num.restart_threshold, step, num.dim_limit);
    SectorTracker odd(
        [&](double a) { return drive.displaced_problem(Sector::Odd, a / w, w); },
        floquet::Labeler::all_states(num.levels, num.m_max), num.restart_threshold, step,
        num.dim_limit);
    for (int j = 0; j < na; ++j) {
      const double a = drive_amplitude[static_cast<std::size_t>(j)];
      even.advance(a);
      odd.advance(a);
      PointResult& r = table[static_cast<std::size_t>(i * na + j)];
      r.grid_index = i * na + j;
      r.omega_d = w;
      r.amplitude = a;
      r.phi = a / w;
      r.stark_shift = tracker_stark(even, drive.bare_gap(), num.m0());
      r.states = transmon_rates(even, odd, drive.operators(r.phi), states, num, env);
      tracker_flags(even, r.flags);
      tracker_flags(odd, r.flags);
    }
  });
  return table;
}

RateTable constant_stark_cut(const circuits::TransmonParams& p, const Numerics& num,
                             const rates::QpEnvironment& env, double delta_target,
                             const std::vector<double>& omega_d) {
  env.validate();
  if (!(delta_target > 0.0)) throw ArgumentError("constant_stark_cut: target must be positive");
  for (double w : omega_d)
    if (!(w > 0.0)) throw ArgumentError("constant_stark_cut: omega_d must be positive");

  const TransmonDrive drive(p, num);
  const double gap = drive.bare_gap();
  const int m0 = num.m0();
  RateTable table(omega_d.size());

  parallel_points(static_cast<int>(omega_d.size()), [&](int i) {
    const double w = omega_d[static_cast<std::size_t>(i)];
    PointResult& r = table[static_cast<std::size_t>(i)];
    r.grid_index = i;
    r.omega_d = w;

    auto factory = [&](double phi) { return drive.displaced_problem(Sector::Even, phi, w); };
    SectorTracker hi(factory, initial_labels(num), num.restart_threshold, num.label_step,
                     num.dim_limit);
    std::optional<SectorTracker> lo;
    double prev = 0.0;
    bool bracketed = false;
    while (hi.amplitude() < kStarkPhiLimit) {
      lo = hi;
      hi.advance(hi.amplitude() + num.label_step);
      const double d = std::abs(tracker_stark(hi, gap, m0));
      if (d < prev) add_flag(r.flags, "stark_nonmonotone");
      prev = d;
      if (d >= delta_target) {
        bracketed = true;
        break;
      }
    }
    if (!bracketed) {
      r.skipped = true;
      add_flag(r.flags, "no_bracket");
      return;
    }

    // Bisection on phi_d between the bracketing labeled points.
    SectorTracker best = hi;
    double best_err = std::abs(std::abs(tracker_stark(hi, gap, m0)) - delta_target);
    double a = lo->amplitude(), b = hi.amplitude();
    for (int it = 0; it < 80 && best_err > kStarkTolerance && b - a > 1e-14; ++it) {
      const double mid = 0.5 * (a + b);
      SectorTracker t = *lo;
      t.advance(mid);
      const double d = std::abs(tracker_stark(t, gap, m0));
      const double err = std::abs(d - delta_target);
      if (err < best_err) {
        best_err = err;
        best = t;
      }
      if (d < delta_target) {
        a = mid;
        lo = std::move(t);
      } else {
        b = mid;
      }
    }
    if (best_err > kStarkTolerance) add_flag(r.flags, "stark_discontinuous");

    const double phi = best.amplitude();
    SectorTracker odd([&](double x) { return drive.displaced_problem(Sector::Odd, x, w); },
                      floquet::Labeler::all_states(num.levels, num.m_max), num.restart_threshold,
                      num.label_step, num.dim_limit);
    odd.advance(phi);
    r.phi = phi;
    r.amplitude = phi * w;
    r.stark_shift = tracker_stark(best, gap, m0);
    r.states = transmon_rates(best, odd, drive.operators(phi), {{"g", 0}, {"e", 1}}, num, env);
    tracker_flags(best, r.flags);
    tracker_flags(odd, r.flags);
  });
  return table;
}

// ---------------------------------------------------------------------------

namespace {

std::pair<double, double> lowest_gaps(const circuits::TransmonParams& p, int cutoff) {
  p.validate();
  if (cutoff < 2) throw ArgumentError("readout: charge cutoff must be >= 2");
  const auto es = specfn::symmetric_eig(circuits::transmon_hamiltonian(p, {Sector::Even, cutoff}));
  return {es.values(1) - es.values(0), es.values(2) - es.values(1)};
}

double chi_per_g2(const circuits::TransmonParams& p, int cutoff, double omega_r) {
  if (!(omega_r > 0.0)) throw ArgumentError("readout: omega_r must be positive");
  const auto [ge, ef] = lowest_gaps(p, cutoff);
  if (std::abs(omega_r - ge) < 1e-3 || std::abs(omega_r - ef) < 1e-3)
    throw ArgumentError("readout: omega_r within 1 MHz of a qubit transition");
  const double w2 = omega_r * omega_r;
  return -8.0 * p.e_c * w2 / ((w2 - ge * ge) * (w2 - ef * ef));
}

}  // namespace

double dispersive_shift(const circuits::TransmonParams& p, int cutoff, double omega_r, double g) {
  return chi_per_g2(p, cutoff, omega_r) * g * g;
}

double solve_readout_coupling(const circuits::TransmonParams& p, int cutoff, double omega_r,
                              double chi_target) {
  if (!(chi_target >= 0.0)) throw ArgumentError("readout: chi target must be >= 0");
  const double c = chi_per_g2(p, cutoff, omega_r);
  return std::sqrt(chi_target / std::abs(c));
}

RateTable readout_sweep(const circuits::TransmonParams& p, const Numerics& num,
                        const rates::QpEnvironment& env, double omega_r, double chi_target,
                        const std::vector<double>& nbar) {
  env.validate();
  if (nbar.empty()) throw ArgumentError("readout_sweep: empty photon-number grid");
  for (std::size_t i = 0; i < nbar.size(); ++i) {
    if (!(nbar[i] >= 0.0)) throw ArgumentError("readout_sweep: nbar must be >= 0");
    if (i > 0 && nbar[i] < nbar[i - 1]) throw ArgumentError("readout_sweep: nbar must ascend");
  }
  const double g = solve_readout_coupling(p, num.charge_cutoff, omega_r, chi_target);
  const TransmonDrive drive(p, num);
  auto phi_of = [&](double nb) { return 2.0 * g * std::sqrt(nb) / omega_r; };

  SectorTracker even([&](double x) { return drive.displaced_problem(Sector::Even, x, omega_r); },
                     initial_labels(num), num.restart_threshold, num.label_step, num.dim_limit);
  SectorTracker odd([&](double x) { return drive.displaced_problem(Sector::Odd, x, omega_r); },
                    floquet::Labeler::all_states(num.levels, num.m_max), num.restart_threshold,
                    num.label_step, num.dim_limit);
  RateTable table;
  for (std::size_t i = 0; i < nbar.size(); ++i) {
    const double phi = phi_of(nbar[i]);
    even.advance(phi);
    odd.advance(phi);
    PointResult r;
    r.grid_index = static_cast<int>(i);
    r.omega_d = omega_r;
    r.amplitude = nbar[i];
    r.phi = phi;
    r.stark_shift = tracker_stark(even, drive.bare_gap(), num.m0());
    r.states = transmon_rates(even, odd, drive.operators(phi), {{"g", 0}, {"e", 1}}, num, env);
    tracker_flags(even, r.flags);
    tracker_flags(odd, r.flags);
    table.push_back(std::move(r));
  }
  return table;
}

// ---------------------------------------------------------------------------

std::vector<WellState> kapitza_well_states(const circuits::SquidParams& p, int cutoff,
                                           double phi_ac, double omega_d) {
  const circuits::ChargeBasis basis{Sector::Even, cutoff};
  const RMatrix h = circuits::effective_hamiltonian_kapitza(p, basis, phi_ac, omega_d);
  const auto es = specfn::symmetric_eig(h);
  const RMatrix cos_phi = circuits::build_charge_operators(basis).cos_phi;

  // Barrier between the wells.
  double barrier = -std::numeric_limits<double>::infinity();
  constexpr int kSamples = 2001;
  for (int i = 0; i < kSamples; ++i) {
    const double phi = M_PI * i / (kSamples - 1);
    barrier = std::max(barrier, circuits::effective_potential(p, phi_ac, omega_d, phi));
  }

  // Without a local minimum at pi there is no pi well to hold states.
  const double v_pi = circuits::effective_potential(p, phi_ac, omega_d, M_PI);
  const bool pi_well = circuits::effective_potential(p, phi_ac, omega_d, M_PI - 1e-3) > v_pi;

  // Localize near-degenerate clusters in the eigenbasis of cos(phi).
  const int n = static_cast<int>(es.values.size());
  RMatrix vecs = es.vectors;
  RVector energies = es.values;
  for (int i = 0; i < n;) {
    int j = i + 1;
    while (j < n && energies(j) - energies(j - 1) < kClusterGap) ++j;
    if (j - i > 1) {
      const RMatrix block = vecs.middleCols(i, j - i);
      const RMatrix c = block.transpose() * cos_phi * block;
      const auto local = specfn::symmetric_eig(0.5 * (c + c.transpose()));
      const RMatrix rot = block * local.vectors;
      const RMatrix hb = rot.transpose() * h * rot;
      vecs.middleCols(i, j - i) = rot;
      energies.segment(i, j - i) = hb.diagonal();
    }
    i = j;
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return energies(a) < energies(b); });

  std::vector<WellState> out(4);
  const char* names[] = {"g0", "e0", "gpi", "epi"};
  for (std::size_t i = 0; i < out.size(); ++i) out[i].name = names[i];
  int found0 = 0, foundpi = 0;
  for (int i : order) {
    if (energies(i) >= barrier) break;
    const RVector v = vecs.col(i);
    const double c = v.dot(cos_phi * v);
    WellState* slot = nullptr;
    if (c > 0.0 && found0 < 2) slot = &out[static_cast<std::size_t>(found0++)];
    if (c < 0.0 && pi_well && foundpi < 2) slot = &out[static_cast<std::size_t>(2 + foundpi++)];
    if (!slot) continue;
    slot->present = true;
    slot->energy = energies(i);
    slot->vector = v;
  }
  return out;
}

namespace {

/// One flux-driven SQUID point. Sectors are diagonalized one after the other;
/// only the four identified initial columns of the even sector are kept.
PointResult squid_point(const circuits::SquidParams& p, const Numerics& num,
                        const rates::QpEnvironment& env, double omega_d, double phi_ac) {
  const int nc = num.charge_cutoff;
  const int m0 = num.m0();
  const int k = num.harmonics(phi_ac);
  const circuits::ChargeBasis even_b{Sector::Even, nc}, odd_b{Sector::Odd, nc};

  PointResult r;
  r.omega_d = omega_d;
  r.amplitude = phi_ac;
  r.phi = phi_ac;

  const auto wells = kapitza_well_states(p, nc, phi_ac, omega_d);
  std::vector<int> columns;
  std::vector<double> overlaps;
  floquet::DressedBasis initial;
  {
    auto even_series = circuits::squid_drive_fourier(p, even_b, 0.0, phi_ac, k);
    const auto even = floquet::diagonalize({std::move(even_series.hamiltonian), omega_d, num.m_max},
                                           num.dim_limit);
    const int d = even.base_dim();
    std::vector<int> cand;
    for (int j = 0; j < even.size(); ++j)
      if (std::lround(even.mean_photon(j)) == m0) cand.push_back(j);
    std::vector<CVector> proj(cand.size());
    for (std::size_t c = 0; c < cand.size(); ++c)
      proj[c] = floquet::project_mode(even.vector(cand[c]), d, num.m_max, 0.0);
    for (const auto& w : wells) {
      int arg = -1;
      double best = 0.0;
      if (w.present) {
        const CVector wc = w.vector.cast<cplx>();
        for (std::size_t c = 0; c < cand.size(); ++c) {
          const double norm = proj[c].norm();
          if (norm == 0.0) continue;
          const double o = std::abs(wc.dot(proj[c])) / norm;
          if (o > best) {
            best = o;
            arg = cand[c];
          }
        }
      }
      columns.push_back(arg);
      overlaps.push_back(best);
    }

    std::vector<int> keep;
    for (int c : columns)
      if (c >= 0) keep.push_back(c);
    RVector e(static_cast<Eigen::Index>(keep.size()));
    RMatrix v(even.real_vectors().rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
      e(static_cast<Eigen::Index>(i)) = even.energy(keep[i]);
      v.col(static_cast<Eigen::Index>(i)) = even.real_vectors().col(keep[i]);
    }
    initial = floquet::DressedBasis(std::move(e), std::move(v), d, num.m_max, omega_d);
  }

  auto odd_series = circuits::squid_drive_fourier(p, odd_b, 0.0, phi_ac, k);
  std::vector<rates::TransitionOperators> ops;
  for (int jn = 0; jn < 2; ++jn) {
    auto& jo = odd_series.junctions[static_cast<std::size_t>(jn)];
    ops.push_back({jn + 1, jo.e_j, std::move(jo.ops.cos_half), std::move(jo.ops.sin_half)});
  }
  const auto odd = floquet::diagonalize({std::move(odd_series.hamiltonian), omega_d, num.m_max},
                                        num.dim_limit);
  const auto finals = rates::finals_by_photon_index(odd, num.m_guard, num.edge_tolerance);

  int slot = 0;
  for (std::size_t i = 0; i < wells.size(); ++i) {
    const auto& w = wells[i];
    StateRates s;
    if (columns[i] < 0) {
      s.name = w.name;
      s.alpha = static_cast<int>(i);
      s.present = false;
      s.summary.alpha = s.alpha;
      add_flag(s.flags, "absent");
      r.states.push_back(std::move(s));
      continue;
    }
    rates::InitialState init{static_cast<int>(i), m0, slot, false};
    auto set = rates::pair_breaking_channels(initial, init, odd, finals, ops, env,
                                             num.rate_options());
    s = finish_state(w.name, static_cast<int>(i), std::move(set), env);
    s.quasienergy = initial.energy(slot) - m0 * omega_d;
    if (overlaps[i] < kLowOverlap) add_flag(s.flags, "low_overlap");
    if (initial.edge_weight(slot, num.m_guard) > num.edge_tolerance) add_flag(s.flags, "edge_leak");
    r.states.push_back(std::move(s));
    ++slot;
  }
  return r;
}

}  // namespace

RateTable kapitza_sweep(const circuits::SquidParams& p, const Numerics& num,
                        const rates::QpEnvironment& env, double omega_d,
                        const std::vector<double>& phi_ac) {
  p.validate();
  num.validate();
  env.validate();
  if (!p.symmetric()) throw ArgumentError("kapitza_sweep: requires a symmetric SQUID");
  if (p.n_g != 0.0) throw ArgumentError("kapitza_sweep: requires n_g = 0");
  if (!(omega_d > 0.0)) throw ArgumentError("kapitza_sweep: omega_d must be positive");
  if (phi_ac.empty()) throw ArgumentError("kapitza_sweep: empty amplitude grid");
  RateTable table(phi_ac.size());
  // Each point holds a full Floquet matrix; points run one at a time and the
  // threads go to the kernels.
  for (std::size_t i = 0; i < phi_ac.size(); ++i) {
    table[i] = squid_point(p, num, env, omega_d, phi_ac[i]);
    table[i].grid_index = static_cast<int>(i);
  }
  return table;
}

// ---------------------------------------------------------------------------

ConvergenceReport convergence_audit(const AuditPoint& point, const std::vector<Numerics>& levels,
                                    const rates::QpEnvironment& env, double threshold) {
  if (levels.size() < 2) throw ArgumentError("convergence_audit: at least two levels required");
  if (!(threshold > 0.0)) throw ArgumentError("convergence_audit: threshold must be positive");
  ConvergenceReport rep;
  rep.threshold = threshold;
  for (const auto& num : levels) {
    num.validate();
    AuditLevel lvl;
    lvl.numerics = num;
    PointResult r;
    if (point.kind == AuditPoint::Kind::Transmon) {
      const TransmonDrive drive(point.transmon, num);
      const double w = point.omega_d;
      SectorTracker even([&](double x) { return drive.displaced_problem(Sector::Even, x, w); },
                         initial_labels(num), num.restart_threshold, num.label_step,
                         num.dim_limit);
      SectorTracker odd([&](double x) { return drive.displaced_problem(Sector::Odd, x, w); },
                        floquet::Labeler::all_states(num.levels, num.m_max),
                        num.restart_threshold, num.label_step, num.dim_limit);
      even.advance(point.amplitude);
      odd.advance(point.amplitude);
      r.states = transmon_rates(even, odd, drive.operators(point.amplitude),
                                {{"g", 0}, {"e", 1}}, num, env);
    } else {
      r = squid_point(point.squid, num, env, point.omega_d, point.amplitude);
    }
    for (const auto& s : r.states) {
      if (!s.present) continue;
      lvl.gamma.push_back(s.summary.gamma);
      lvl.energy.push_back(s.quasienergy);
      lvl.truncation_warning = lvl.truncation_warning || s.channels.truncation_warning;
    }
    rep.levels.push_back(std::move(lvl));
  }
  const auto& a = rep.levels[rep.levels.size() - 2];
  const auto& b = rep.levels.back();
  if (a.gamma.size() != b.gamma.size()) {
    rep.gamma_drift = rep.energy_drift = std::numeric_limits<double>::infinity();
  } else {
    for (std::size_t i = 0; i < a.gamma.size(); ++i) {
      const double scale = std::max(std::abs(a.gamma[i]), std::abs(b.gamma[i]));
      if (scale > 0.0)
        rep.gamma_drift = std::max(rep.gamma_drift, std::abs(a.gamma[i] - b.gamma[i]) / scale);
      rep.energy_drift =
          std::max(rep.energy_drift, std::abs(a.energy[i] - b.energy[i]) / point.omega_d);
    }
  }
  rep.pass = rep.gamma_drift < threshold && rep.energy_drift < threshold && !b.truncation_warning;
  return rep;
}

}  // namespace qpgen::scenarios
