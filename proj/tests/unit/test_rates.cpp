#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "qpgen/errors.hpp"
#include "qpgen/rates.hpp"
#include "qpgen/scenarios.hpp"

using namespace qpgen;
using circuits::Sector;

namespace {

scenarios::Numerics small_numerics() {
  scenarios::Numerics n;
  n.charge_cutoff = 15;
  n.levels = 6;
  n.m_max = 8;
  n.m_guard = 2;
  return n;
}

struct Point {
  scenarios::TransmonDrive drive{{3.025, 0.056, 0.0}, small_numerics()};
  floquet::DressedBasis even, odd;
  std::vector<rates::TransitionOperators> ops;
  std::vector<rates::FinalState> finals;
  rates::InitialState init;

  Point(double phi_d, double omega_d, int alpha = 0) {
    const auto ep = drive.displaced_problem(Sector::Even, phi_d, omega_d);
    even = floquet::diagonalize(ep);
    odd = floquet::diagonalize(drive.displaced_problem(Sector::Odd, phi_d, omega_d));
    ops = drive.operators(phi_d);
    finals = rates::finals_by_photon_index(odd);
    const int m0 = drive.numerics().m0();
    int best = 0;
    for (int j = 0; j < even.size(); ++j)
      if (std::abs(even.vector(j)(ep.index(alpha, m0))) > std::abs(even.vector(best)(ep.index(alpha, m0))))
        best = j;
    init = {alpha, m0, best, false};
  }

  rates::RateOptions options() const { return drive.numerics().rate_options(); }
};

// Dense extended operator: block (m', m) = X^(m' - m).
CMatrix extended(const FourierSeries& x, int m_max) {
  const int nb = 2 * m_max + 1;
  CMatrix big = CMatrix::Zero(x.rows() * nb, x.cols() * nb);
  for (int mp = -m_max; mp <= m_max; ++mp)
    for (int m = -m_max; m <= m_max; ++m)
      if (std::abs(mp - m) <= x.k_max())
        big.block((mp + m_max) * x.rows(), (m + m_max) * x.cols(), x.rows(), x.cols()) = x[mp - m];
  return big;
}

struct Amps {
  std::vector<double> c2, s2;
};

Amps dressed_elements(const Point& p, const rates::TransitionOperators& op) {
  const int m = p.even.m_max();
  const CVector psi = p.even.vector(p.init.column);
  const CVector wc = extended(op.cos_half, m) * psi;
  const CVector ws = extended(op.sin_half, m) * psi;
  Amps a;
  for (int j = 0; j < p.odd.size(); ++j) {
    const CVector v = p.odd.vector(j);
    a.c2.push_back(std::norm(v.dot(wc)));
    a.s2.push_back(std::norm(v.dot(ws)));
  }
  return a;
}

// Golden rule summed by hand, structure factors from quadrature.
std::map<std::pair<int, int>, double> brute_force(const Point& p, const specfn::Gap& gap) {
  std::map<std::pair<int, int>, double> out;
  const int window = p.even.m_max() - p.options().m_guard;
  const double e0 = p.even.energy(p.init.column);
  for (const auto& op : p.ops) {
    const Amps a = dressed_elements(p, op);
    for (int j = 0; j < p.odd.size(); ++j) {
      const auto& f = p.finals[j];
      if (std::abs(f.m) > window) continue;
      const double w = e0 - p.odd.energy(j);
      if (w <= gap.pair_threshold_ghz()) continue;
      const double g =
          16.0 * op.e_j * 1e9 *
          (a.c2[j] * specfn::s_ph_quadrature(specfn::StructureFactorKind::Plus, w, gap) +
           a.s2[j] * specfn::s_ph_quadrature(specfn::StructureFactorKind::Minus, w, gap));
      if (g > 0.0) out[{f.beta, p.init.m0 - f.m}] += g;
    }
  }
  return out;
}

}  // namespace

TEST(Rates, PrefactorAndEnvironment) {
  EXPECT_DOUBLE_EQ(rates::gamma_ph(3.025), 16 * 3.025e9);
  rates::QpEnvironment env;
  EXPECT_NO_THROW(env.validate());
  env.n_cp = 0.0;
  EXPECT_THROW(env.validate(), ArgumentError);
}

TEST(Rates, MatchesBruteForceGoldenRule) {
  const Point p(0.3, 50.0);
  const rates::QpEnvironment env;
  const auto set = rates::pair_breaking_channels(p.even, p.init, p.odd, p.finals, p.ops, env, p.options());
  const auto ref = brute_force(p, env.gap);
  ASSERT_FALSE(ref.empty());
  std::map<std::pair<int, int>, double> got;
  for (const auto& c : set.channels) {
    got[{c.beta, c.n}] += c.gamma;
    EXPECT_GT(c.omega, env.gap.pair_threshold_ghz());
    EXPECT_GT(c.gamma, 0.0);
  }
  ASSERT_EQ(got.size(), ref.size());
  for (const auto& [key, g] : ref) EXPECT_NEAR(got[key], g, 1e-6 * g) << "beta/n " << key.first << "/" << key.second;
  // n = 2 is the lowest open process at 50 GHz
  for (const auto& c : set.channels) EXPECT_GE(c.n, 2);
  EXPECT_GT(rates::pair_breaking_rate_n(set, -1, 2), 0.0);
}

TEST(Rates, ZeroDriveHasNoChannels) {
  const Point p(0.0, 50.0);
  const auto set = rates::pair_breaking_channels(p.even, p.init, p.odd, p.finals, p.ops, {}, p.options());
  EXPECT_TRUE(set.channels.empty());
  const auto s = rates::parity_summary(set);
  EXPECT_EQ(s.gamma, 0.0);
  EXPECT_TRUE(std::isinf(s.lifetime));
}

TEST(Rates, SummaryBookkeeping) {
  const Point p(0.3, 50.0);
  const auto set = rates::pair_breaking_channels(p.even, p.init, p.odd, p.finals, p.ops, {}, p.options());
  const auto s = rates::parity_summary(set);
  double sum = 0.0, by_beta = 0.0;
  for (const auto& c : set.channels) sum += c.gamma;
  for (const auto& [beta, g] : s.by_final) {
    by_beta += g;
    std::map<int, double> per_n;
    EXPECT_NEAR(rates::total_rate(set, beta, &per_n), g, 1e-12 * g);
    double t = 0.0;
    for (const auto& [n, v] : per_n) t += v;
    EXPECT_NEAR(t, g, 1e-12 * g);
  }
  EXPECT_NEAR(s.gamma, sum, 1e-12 * sum);
  EXPECT_NEAR(by_beta, sum, 1e-12 * sum);
  EXPECT_DOUBLE_EQ(s.lifetime, 1.0 / s.gamma);
}

TEST(Rates, SingleThresholdHierarchy) {
  const Point p(0.05, 100.0);
  const auto set = rates::pair_breaking_channels(p.even, p.init, p.odd, p.finals, p.ops, {}, p.options());
  const double g1 = rates::pair_breaking_rate_n(set, -1, 1);
  ASSERT_GT(g1, 0.0);
  for (int n = 2; n <= 4; ++n) EXPECT_LT(rates::pair_breaking_rate_n(set, -1, n), 0.1 * g1) << "n=" << n;
}

TEST(Rates, InitialStateOutsideWindowRejected) {
  Point p(0.1, 50.0);
  p.init.m0 = 7;
  EXPECT_THROW(rates::pair_breaking_channels(p.even, p.init, p.odd, p.finals, p.ops, {}, p.options()),
               ArgumentError);
  EXPECT_THROW(rates::finals_by_photon_index(p.odd, 9), ArgumentError);
}

TEST(Rates, SteadyStateQuasiparticleDensity) {
  EXPECT_EQ(rates::steady_state_xqp(0.0), 0.0);
  EXPECT_DOUBLE_EQ(rates::steady_state_xqp(2e6 / 120e-9), 1.0);
  for (double g : {1e-3, 1.0, 1e3}) EXPECT_NEAR(rates::steady_state_xqp(g), std::sqrt(g * 120e-9 / 2e6), 1e-20);
  const double ms = rates::steady_state_xqp(1e3);
  EXPECT_GT(ms, 1e-6);
  EXPECT_LT(ms, 1e-4);
  EXPECT_THROW(rates::steady_state_xqp(1.0, 0.0), ArgumentError);
  EXPECT_THROW(rates::steady_state_xqp(1.0, 2e6, -1.0), ArgumentError);
}

TEST(QpTunneling, ZeroStructureFactors) {
  const Point p(0.3, 50.0);
  auto zero = [](double) { return 0.0; };
  EXPECT_EQ(rates::qp_tunneling_rate(p.even, p.init, p.odd, p.finals, p.ops, -1, zero, zero, p.options()), 0.0);
}

TEST(QpTunneling, ZeroDriveReducesToStaticElements) {
  const Point p(0.0, 50.0);
  auto one = [](double) { return 1.0; };
  const double got = rates::qp_tunneling_rate(p.even, p.init, p.odd, p.finals, p.ops, -1, one, one, p.options());
  const auto& eb = p.drive.eig();
  double ref = 0.0;
  for (int b = 0; b < eb.d; ++b)
    ref += std::norm(cplx(eb.cos_half_phi(b, 0))) + std::norm(eb.sin_half_phi(b, 0));
  ref *= rates::gamma_ph(3.025);
  EXPECT_NEAR(got, ref, 1e-10 * ref);
}

TEST(QpTunneling, DrivenMatchesDirectSummation) {
  const Point p(0.4, 30.0);
  auto one = [](double) { return 1.0; };
  const double got = rates::qp_tunneling_rate(p.even, p.init, p.odd, p.finals, p.ops, -1, one, one, p.options());
  const Amps a = dressed_elements(p, p.ops[0]);
  const int window = p.even.m_max() - p.options().m_guard;
  double ref = 0.0;
  for (int j = 0; j < p.odd.size(); ++j)
    if (std::abs(p.finals[j].m) <= window) ref += a.c2[j] + a.s2[j];
  ref *= rates::gamma_ph(3.025);
  EXPECT_NEAR(got, ref, 1e-10 * ref);
  // cos pairs with S-, sin with S+
  auto plus = [](double) { return 1.0; };
  auto minus = [](double) { return 0.0; };
  double sin_only = 0.0;
  for (int j = 0; j < p.odd.size(); ++j)
    if (std::abs(p.finals[j].m) <= window) sin_only += a.s2[j];
  sin_only *= rates::gamma_ph(3.025);
  EXPECT_NEAR(rates::qp_tunneling_rate(p.even, p.init, p.odd, p.finals, p.ops, -1, plus, minus, p.options()),
              sin_only, 1e-10 * ref);
}
