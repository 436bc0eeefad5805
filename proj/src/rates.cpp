#include "qpgen/rates.hpp"

#include <cmath>
#include <climits>
#include <string>
#include <tuple>

#include "qpgen/errors.hpp"
#include "qpgen/kernels.hpp"

namespace qpgen::rates {

namespace {

constexpr int kUnplaced = INT_MIN;

struct Amplitudes {
  CVector cos_amp;
  CVector sin_amp;
};

Amplitudes amplitudes(const floquet::DressedBasis& even, int column,
                      const floquet::DressedBasis& odd, const TransitionOperators& op) {
  const CVector psi = even.vector(column);
  const CVector wc = kernels::apply_extended(op.cos_half, even.m_max(), psi);
  const CVector ws = kernels::apply_extended(op.sin_half, even.m_max(), psi);
  return {odd.project(wc), odd.project(ws)};
}

void check_inputs(const floquet::DressedBasis& even, const InitialState& init,
                  const floquet::DressedBasis& odd, const std::vector<FinalState>& finals,
                  const std::vector<TransitionOperators>& ops, const RateOptions& opt) {
  if (even.m_max() != odd.m_max()) throw ArgumentError("rates: sectors use different m_max");
  if (static_cast<int>(finals.size()) != odd.size())
    throw ArgumentError("rates: one final-state label per odd eigenvector required");
  if (init.column < 0 || init.column >= even.size())
    throw ArgumentError("rates: initial state is not labeled");
  if (opt.m_guard < 0) throw ArgumentError("rates: m_guard must be >= 0");
  const int window = even.m_max() - opt.m_guard;
  if (window < 0 || std::abs(init.m0) > window)
    throw ArgumentError("rates: initial photon index outside the interior window");
  for (const auto& op : ops) {
    if (op.cos_half.rows() != odd.base_dim() || op.cos_half.cols() != even.base_dim() ||
        op.sin_half.rows() != odd.base_dim() || op.sin_half.cols() != even.base_dim())
      throw ArgumentError("rates: transition operators do not match the sector bases");
  }
}

bool in_window(const FinalState& f, int window) {
  return f.m != kUnplaced && std::abs(f.m) <= window;
}

}  // namespace

void QpEnvironment::validate() const {
  gap.validate();
  if (!(n_cp > 0.0) || !(c_r > 0.0)) throw ArgumentError("QpEnvironment: N_cp and c_r must be positive");
}

double gamma_ph(double e_j_ghz) { return 16.0 * e_j_ghz * 1e9; }

ChannelSet pair_breaking_channels(const floquet::DressedBasis& even, const InitialState& init,
                                  const floquet::DressedBasis& odd,
                                  const std::vector<FinalState>& finals,
                                  const std::vector<TransitionOperators>& ops,
                                  const QpEnvironment& env, const RateOptions& opt) {
  env.validate();
  check_inputs(even, init, odd, finals, ops, opt);
  const int window = even.m_max() - opt.m_guard;
  const double threshold = env.gap.pair_threshold_ghz();
  const double e0 = even.energy(init.column);

  ChannelSet out;
  out.alpha = init.alpha;
  out.n_max = init.m0 + window;
  out.ambiguous = init.ambiguous;

  struct Acc {
    double gamma = 0.0;
    double weighted_omega = 0.0;
    bool ambiguous = false;
  };
  std::map<std::tuple<int, int, int>, Acc> acc;

  for (const auto& op : ops) {
    const Amplitudes amp = amplitudes(even, init.column, odd, op);
    const double pref = gamma_ph(op.e_j);
    std::vector<double> contrib;
    kernels::map_indexed(odd.size(), [&](int j) {
      const FinalState& f = finals[static_cast<std::size_t>(j)];
      if (!in_window(f, window)) return 0.0;
      const double omega = e0 - odd.energy(j);
      if (omega <= threshold) return 0.0;
      const double c2 = std::norm(amp.cos_amp(j));
      const double s2 = std::norm(amp.sin_amp(j));
      const double g =
          pref * (c2 * specfn::s_ph_analytic(specfn::StructureFactorKind::Plus, omega, env.gap) +
                  s2 * specfn::s_ph_analytic(specfn::StructureFactorKind::Minus, omega, env.gap));
      return g;
    }, contrib);

    for (int j = 0; j < odd.size(); ++j) {
      const double g = contrib[static_cast<std::size_t>(j)];
      if (g == 0.0) continue;
      const FinalState& f = finals[static_cast<std::size_t>(j)];
      const int n = init.m0 - f.m;
      if (n <= 0)
        throw NumericError("rates: emission-side channel n=" + std::to_string(n) + " to beta=" +
                           std::to_string(f.beta) + " at omega=" + std::to_string(e0 - odd.energy(j)) +
                           " GHz lies above the pair-breaking threshold");
      Acc& a = acc[{f.beta, n, op.junction}];
      a.gamma += g;
      a.weighted_omega += g * (e0 - odd.energy(j));
      a.ambiguous = a.ambiguous || f.ambiguous;
    }
  }

  std::map<int, double> per_n;
  double total = 0.0;
  for (const auto& [key, a] : acc) {
    const auto [beta, n, junction] = key;
    Channel c;
    c.alpha = init.alpha;
    c.beta = beta;
    c.n = n;
    c.junction = junction;
    c.gamma = a.gamma;
    c.omega = a.weighted_omega / a.gamma;
    c.ambiguous = a.ambiguous || init.ambiguous;
    out.ambiguous = out.ambiguous || c.ambiguous;
    out.channels.push_back(c);
    per_n[n] += a.gamma;
    total += a.gamma;
  }
  if (total > 0.0) {
    int largest = 0;
    for (const auto& [n, g] : per_n)
      if (g >= opt.warn_fraction * total) largest = std::max(largest, n);
    out.truncation_warning = largest >= out.n_max - opt.warn_margin;
  }
  return out;
}

double pair_breaking_rate_n(const ChannelSet& set, int beta, int n, int junction) {
  double g = 0.0;
  for (const auto& c : set.channels)
    if (c.beta == beta && c.n == n && (junction <= 0 || c.junction == junction)) g += c.gamma;
  return g;
}

double total_rate(const ChannelSet& set, int beta, std::map<int, double>* per_n, int junction) {
  std::map<int, double> breakdown;
  for (const auto& c : set.channels)
    if (c.beta == beta && (junction <= 0 || c.junction == junction)) breakdown[c.n] += c.gamma;
  double g = 0.0;
  for (const auto& [n, v] : breakdown) g += v;
  if (per_n) *per_n = std::move(breakdown);
  return g;
}

ParitySummary parity_summary(const ChannelSet& set) {
  ParitySummary s;
  s.alpha = set.alpha;
  for (const auto& c : set.channels) s.by_final[c.beta] += c.gamma;
  for (const auto& [beta, g] : s.by_final) s.gamma += g;
  if (s.gamma > 0.0) s.lifetime = 1.0 / s.gamma;
  return s;
}

double steady_state_xqp(double gamma, double n_cp, double c_r) {
  if (!(n_cp > 0.0) || !(c_r > 0.0)) throw ArgumentError("steady_state_xqp: N_cp and c_r must be positive");
  if (!(gamma >= 0.0)) throw ArgumentError("steady_state_xqp: rate must be nonnegative");
  return std::sqrt(gamma / (n_cp * c_r));
}

double qp_tunneling_rate(const floquet::DressedBasis& even, const InitialState& init,
                         const floquet::DressedBasis& odd, const std::vector<FinalState>& finals,
                         const std::vector<TransitionOperators>& ops, int beta,
                         const StructureFactor& s_qp_plus, const StructureFactor& s_qp_minus,
                         const RateOptions& opt) {
  check_inputs(even, init, odd, finals, ops, opt);
  const int window = even.m_max() - opt.m_guard;
  const double e0 = even.energy(init.column);
  double total = 0.0;
  for (const auto& op : ops) {
    const Amplitudes amp = amplitudes(even, init.column, odd, op);
    const double pref = gamma_ph(op.e_j);
    for (int j = 0; j < odd.size(); ++j) {
      const FinalState& f = finals[static_cast<std::size_t>(j)];
      if (!in_window(f, window) || (beta >= 0 && f.beta != beta)) continue;
      const double omega = odd.energy(j) - e0;
      const double c2 = std::norm(amp.cos_amp(j));
      const double s2 = std::norm(amp.sin_amp(j));
      if (c2 == 0.0 && s2 == 0.0) continue;
      total += pref * (c2 * s_qp_minus(omega) + s2 * s_qp_plus(omega));
    }
  }
  return total;
}

std::vector<FinalState> finals_from_labels(const std::vector<floquet::StateLabel>& tracked,
                                           const std::vector<int>& index,
                                           const std::vector<std::uint8_t>& ambiguous,
                                           int columns) {
  if (index.size() != tracked.size()) throw ArgumentError("finals_from_labels: size mismatch");
  std::vector<FinalState> out(static_cast<std::size_t>(columns), FinalState{-1, kUnplaced, false});
  for (std::size_t t = 0; t < tracked.size(); ++t) {
    const int j = index[t];
    if (j < 0 || j >= columns) throw ArgumentError("finals_from_labels: column out of range");
    out[static_cast<std::size_t>(j)] = {tracked[t].alpha, tracked[t].m,
                                        t < ambiguous.size() && ambiguous[t] != 0};
  }
  return out;
}

std::vector<FinalState> finals_by_photon_index(const floquet::DressedBasis& odd, int m_guard,
                                               double edge_tolerance) {
  if (m_guard < 0 || m_guard > odd.m_max()) throw ArgumentError("finals_by_photon_index: bad m_guard");
  std::vector<FinalState> out(static_cast<std::size_t>(odd.size()));
  for (int j = 0; j < odd.size(); ++j) {
    const bool leaks = m_guard > 0 && odd.edge_weight(j, m_guard) > edge_tolerance;
    const int m = leaks ? kUnplaced : static_cast<int>(std::lround(odd.mean_photon(j)));
    out[static_cast<std::size_t>(j)] = {-1, m, false};
  }
  return out;
}

}  // namespace qpgen::rates
