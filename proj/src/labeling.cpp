#include "qpgen/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>
#include <tuple>

#include "qpgen/errors.hpp"
#include "qpgen/kernels.hpp"

namespace qpgen::floquet {

namespace {

constexpr int kCandidates = 4;
constexpr double kStartOverlap = 0.99;

struct Entry {
  double score;
  int t;
  int j;
};

}  // namespace

int LabelResult::ambiguous_count() const {
  return static_cast<int>(std::count(ambiguous.begin(), ambiguous.end(), std::uint8_t{1}));
}

Labeler::Labeler(int base_dim, int m_max, std::vector<StateLabel> tracked,
                 double restart_threshold, double ambiguity_tol)
    : base_dim_(base_dim),
      m_max_(m_max),
      tracked_(std::move(tracked)),
      restart_threshold_(restart_threshold),
      ambiguity_tol_(ambiguity_tol) {
  if (base_dim < 1 || m_max < 0) throw ArgumentError("Labeler: invalid extended space");
  if (!(restart_threshold > 0.0 && restart_threshold < 1.0))
    throw ArgumentError("Labeler: restart threshold must lie in (0, 1)");
  if (!(ambiguity_tol >= 0.0)) throw ArgumentError("Labeler: ambiguity tolerance must be >= 0");
  if (tracked_.empty()) throw ArgumentError("Labeler: nothing to track");
  const Eigen::Index n = static_cast<Eigen::Index>(base_dim) * (2 * m_max + 1);
  refs_ = CMatrix::Zero(n, static_cast<Eigen::Index>(tracked_.size()));
  for (std::size_t t = 0; t < tracked_.size(); ++t) {
    const auto& s = tracked_[t];
    if (s.alpha < 0 || s.alpha >= base_dim || s.m < -m_max || s.m > m_max)
      throw ArgumentError("Labeler: tracked state outside the extended space");
    for (std::size_t u = 0; u < t; ++u)
      if (tracked_[u] == s) throw ArgumentError("Labeler: tracked states must be distinct");
    refs_((s.m + m_max) * base_dim + s.alpha, static_cast<Eigen::Index>(t)) = 1.0;
  }
}

std::vector<StateLabel> Labeler::all_states(int base_dim, int m_max) {
  std::vector<StateLabel> out;
  out.reserve(static_cast<std::size_t>(base_dim) * (2 * m_max + 1));
  for (int m = -m_max; m <= m_max; ++m)
    for (int a = 0; a < base_dim; ++a) out.push_back({a, m});
  return out;
}

int Labeler::position(const StateLabel& s) const {
  for (std::size_t t = 0; t < tracked_.size(); ++t)
    if (tracked_[t] == s) return static_cast<int>(t);
  return -1;
}

RMatrix Labeler::overlaps(const DressedBasis& basis) const {
  if (basis.is_real() && refs_real_) {
    const RMatrix r = refs_.real();
    return kernels::overlap_abs(r, basis.real_vectors());
  }
  if (basis.is_real()) {
    const CMatrix v = basis.real_vectors().cast<cplx>();
    return kernels::overlap_abs(refs_, v);
  }
  return kernels::overlap_abs(refs_, basis.complex_vectors());
}

LabelResult Labeler::assign(const RMatrix& ov, const DressedBasis& basis) const {
  const int nt = static_cast<int>(tracked_.size());
  const int n = basis.size();
  const int kc = std::min(kCandidates, n);

  LabelResult res;
  res.index.assign(static_cast<std::size_t>(nt), -1);
  res.overlap.assign(static_cast<std::size_t>(nt), 0.0);
  res.bare_overlap.assign(static_cast<std::size_t>(nt), 0.0);
  res.ambiguous.assign(static_cast<std::size_t>(nt), 0);
  res.restarted.assign(static_cast<std::size_t>(nt), 0);

  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(nt) * kc);
  std::vector<double> best(static_cast<std::size_t>(nt), 0.0);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int t = 0; t < nt; ++t) {
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + kc, order.end(), [&](int a, int b) {
      const double oa = ov(t, a), ob = ov(t, b);
      return oa > ob || (oa == ob && a < b);
    });
    const double top = ov(t, order[0]);
    best[static_cast<std::size_t>(t)] = top;
    int preferred = order[0];
    if (kc > 1 && top - ov(t, order[1]) < ambiguity_tol_) {
      res.ambiguous[static_cast<std::size_t>(t)] = 1;
      if (steps_ > 0) {
        // continue the previous trajectory
        double keep = -1.0;
        for (int c = 0; c < kc; ++c) {
          const int j = order[static_cast<std::size_t>(c)];
          if (top - ov(t, j) >= ambiguity_tol_) break;
          const double o = std::abs(prev_.col(t).dot(basis.vector(j)));
          if (o > keep) {
            keep = o;
            preferred = j;
          }
        }
      }
    }
    for (int c = 0; c < kc; ++c) {
      const int j = order[static_cast<std::size_t>(c)];
      const double bump = (j == preferred && res.ambiguous[static_cast<std::size_t>(t)]) ? ambiguity_tol_ : 0.0;
      entries.push_back({ov(t, j) + bump, t, j});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(b.score, a.t, a.j) < std::tie(a.score, b.t, b.j);
  });

  std::vector<std::uint8_t> taken(static_cast<std::size_t>(n), 0);
  for (const auto& e : entries) {
    if (res.index[static_cast<std::size_t>(e.t)] >= 0 || taken[static_cast<std::size_t>(e.j)]) continue;
    res.index[static_cast<std::size_t>(e.t)] = e.j;
    taken[static_cast<std::size_t>(e.j)] = 1;
  }

  // Leftovers take their best free column, strongest reference first.
  std::vector<int> rest;
  for (int t = 0; t < nt; ++t)
    if (res.index[static_cast<std::size_t>(t)] < 0) rest.push_back(t);
  std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) {
    return best[static_cast<std::size_t>(a)] > best[static_cast<std::size_t>(b)];
  });
  for (int t : rest) {
    int arg = -1;
    for (int j = 0; j < n; ++j)
      if (!taken[static_cast<std::size_t>(j)] && (arg < 0 || ov(t, j) > ov(t, arg))) arg = j;
    if (arg < 0) throw NumericError("Labeler: more tracked states than eigenvectors");
    res.index[static_cast<std::size_t>(t)] = arg;
    taken[static_cast<std::size_t>(arg)] = 1;
  }

  for (int t = 0; t < nt; ++t) {
    const int j = res.index[static_cast<std::size_t>(t)];
    const auto& s = tracked_[static_cast<std::size_t>(t)];
    const int row = (s.m + m_max_) * base_dim_ + s.alpha;
    res.overlap[static_cast<std::size_t>(t)] = ov(t, j);
    res.bare_overlap[static_cast<std::size_t>(t)] =
        basis.is_real() ? std::abs(basis.real_vectors()(row, j))
                        : std::abs(basis.complex_vectors()(row, j));
  }
  return res;
}

LabelResult Labeler::step(const DressedBasis& basis) {
  if (basis.base_dim() != base_dim_ || basis.m_max() != m_max_)
    throw ArgumentError("Labeler: basis does not match the labeled extended space");
  RMatrix ov = overlaps(basis);
  LabelResult res = assign(ov, basis);

  if (steps_ == 0) {
    for (std::size_t t = 0; t < tracked_.size(); ++t)
      if (res.bare_overlap[t] < kStartOverlap)
        throw ContractError("Labeler: sweep must start at negligible drive");
  } else {
    std::vector<int> restart;
    for (std::size_t t = 0; t < tracked_.size(); ++t)
      if (res.overlap[t] < restart_threshold_) restart.push_back(static_cast<int>(t));
    if (!restart.empty()) {
      for (int t : restart) refs_.col(t) = prev_.col(t);
      refs_real_ = refs_real_ && basis.is_real() && prev_.imag().isZero(0.0);
      ov = overlaps(basis);
      res = assign(ov, basis);
      for (int t : restart) res.restarted[static_cast<std::size_t>(t)] = 1;
    }
  }

  // Keep the labeled vectors for the next restart, gauge-aligned to the
  // previous point.
  CMatrix next(refs_.rows(), refs_.cols());
  for (std::size_t t = 0; t < tracked_.size(); ++t) {
    CVector v = basis.vector(res.index[t]);
    if (steps_ > 0) {
      const cplx o = prev_.col(static_cast<Eigen::Index>(t)).dot(v);
      if (std::abs(o) > 0.0) v *= std::conj(o) / std::abs(o);
    }
    next.col(static_cast<Eigen::Index>(t)) = v;
  }
  prev_ = std::move(next);
  ++steps_;
  return res;
}

int LabeledSpectrum::position(const StateLabel& s) const {
  for (std::size_t t = 0; t < tracked.size(); ++t)
    if (tracked[t] == s) return static_cast<int>(t);
  return -1;
}

LabeledSpectrum label_sweep(const std::vector<double>& amplitudes,
                            const std::function<FloquetProblem(double)>& make,
                            std::vector<StateLabel> tracked, double restart_threshold,
                            bool keep_bases) {
  if (amplitudes.empty()) throw ArgumentError("label_sweep: empty sweep");
  LabeledSpectrum out;
  out.tracked = tracked;
  std::unique_ptr<Labeler> labeler;
  for (double a : amplitudes) {
    const FloquetProblem problem = make(a);
    DressedBasis basis = diagonalize(problem);
    if (!labeler)
      labeler = std::make_unique<Labeler>(problem.base_dim(), problem.m_max, tracked,
                                          restart_threshold);
    LabeledPoint pt;
    pt.amplitude = a;
    pt.labels = labeler->step(basis);
    pt.energies.resize(static_cast<Eigen::Index>(tracked.size()));
    for (std::size_t t = 0; t < tracked.size(); ++t)
      pt.energies(static_cast<Eigen::Index>(t)) = basis.energy(pt.labels.index[t]);
    out.points.push_back(std::move(pt));
    if (keep_bases) out.bases.push_back(std::move(basis));
  }
  return out;
}

double stark_shift(const std::vector<StateLabel>& tracked, const RVector& energies,
                   double bare_gap) {
  for (std::size_t t = 0; t < tracked.size(); ++t) {
    if (tracked[t].alpha != 0) continue;
    for (std::size_t u = 0; u < tracked.size(); ++u)
      if (tracked[u].alpha == 1 && tracked[u].m == tracked[t].m)
        return (energies(static_cast<Eigen::Index>(u)) - energies(static_cast<Eigen::Index>(t))) -
               bare_gap;
  }
  throw ArgumentError("stark_shift: (g, m) and (e, m) must both be labeled");
}

double stark_shift(const LabeledSpectrum& spectrum, std::size_t point, double bare_gap) {
  if (point >= spectrum.points.size()) throw ArgumentError("stark_shift: point out of range");
  return stark_shift(spectrum.tracked, spectrum.points[point].energies, bare_gap);
}

}  // namespace qpgen::floquet
