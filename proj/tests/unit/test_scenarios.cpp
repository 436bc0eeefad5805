#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qpgen/errors.hpp"
#include "qpgen/scenarios.hpp"

using namespace qpgen;

namespace {

const circuits::TransmonParams kDrivenTransmon{3.025, 0.056, 0.0};
const circuits::TransmonParams kReadoutTransmon{12.85, 0.218, 0.1};

scenarios::Numerics tiny() {
  scenarios::Numerics n;
  n.charge_cutoff = 15;
  n.levels = 8;
  n.m_max = 8;
  n.m_guard = 2;
  return n;
}

}  // namespace

TEST(Numerics, ProfilesAndValidation) {
  for (bool ci : {false, true}) {
    EXPECT_NO_THROW(scenarios::transmon_profile(ci).validate());
    EXPECT_NO_THROW(scenarios::readout_profile(ci).validate());
    EXPECT_NO_THROW(scenarios::squid_profile(ci).validate());
  }
  const auto full = scenarios::transmon_profile(false);
  EXPECT_EQ(full.charge_cutoff, 50);
  EXPECT_EQ(full.m_max, 15);
  EXPECT_EQ(full.m0(), 8);
  EXPECT_LE(full.levels * (2 * full.m_max + 1), 2000);
  const auto sq = scenarios::squid_profile(false);
  EXPECT_LE(sq.levels * (2 * sq.m_max + 1), 7100);
  const auto ci = scenarios::transmon_profile(true);
  EXPECT_EQ(ci.charge_cutoff, 20);
  EXPECT_EQ(ci.levels, 12);
  EXPECT_EQ(ci.m_max, 10);

  auto bad = tiny();
  bad.m_guard = 7;
  EXPECT_THROW(bad.validate(), ArgumentError);
  bad = tiny();
  bad.levels = 40;
  EXPECT_THROW(bad.validate(), ArgumentError);
  bad = tiny();
  bad.charge_cutoff = 5000;
  EXPECT_THROW(bad.validate(), ResourceError);
}

TEST(ChargeDriveMap, ZeroAndWeakDrive) {
  const auto t = scenarios::charge_drive_map(kDrivenTransmon, tiny(), {}, {8.0, 10.0}, {0.0, 0.05, 0.1}, true);
  ASSERT_EQ(t.size(), 6u);
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(t[i].grid_index, static_cast<int>(i));
    const auto* g = t[i].state("g");
    ASSERT_NE(g, nullptr);
    ASSERT_NE(t[i].state("e"), nullptr);
    if (t[i].amplitude == 0.0) {
      EXPECT_EQ(g->summary.gamma, 0.0);
      EXPECT_TRUE(std::isinf(g->summary.lifetime));
    }
    EXPECT_LT(g->summary.gamma, 1e-3);
  }
  EXPECT_DOUBLE_EQ(t[4].phi, 0.05 / 10.0);
  EXPECT_THROW(scenarios::charge_drive_map(kDrivenTransmon, tiny(), {}, {-1.0}, {0.0}, false), ArgumentError);
}

TEST(ChargeDriveMap, ReplicaIndependence) {
  auto a = tiny(), b = tiny();
  a.m_max = b.m_max = 15;
  a.m_initial = 5;
  b.m_initial = 6;
  const auto ta = scenarios::charge_drive_map(kDrivenTransmon, a, {}, {46.0}, {46.0 * 0.15}, false);
  const auto tb = scenarios::charge_drive_map(kDrivenTransmon, b, {}, {46.0}, {46.0 * 0.15}, false);
  const auto& ga = *ta[0].state("g");
  const auto& gb = *tb[0].state("g");
  EXPECT_NEAR(ga.quasienergy, gb.quasienergy, 1e-6 * std::abs(ga.quasienergy));
  // Channels far below the total hit the double-precision floor of their
  // matrix elements, hence the absolute term.
  const double floor = 1e-16 * ga.summary.gamma;
  for (int n = 2; n <= 4; ++n)
    for (int beta = 0; beta < 3; ++beta) {
      const double x = rates::pair_breaking_rate_n(ga.channels, beta, n);
      const double y = rates::pair_breaking_rate_n(gb.channels, beta, n);
      EXPECT_NEAR(x, y, 1e-8 * std::max(x, y) + floor) << "beta=" << beta << " n=" << n;
    }
}

TEST(StarkCut, HitsTargetShift) {
  const auto t = scenarios::constant_stark_cut(kDrivenTransmon, tiny(), {}, 0.003, {46.0});
  ASSERT_EQ(t.size(), 1u);
  ASSERT_FALSE(t[0].skipped);
  EXPECT_NEAR(std::abs(t[0].stark_shift), 0.003, 1e-6);
  EXPECT_DOUBLE_EQ(t[0].amplitude, t[0].phi * 46.0);
  EXPECT_GT(t[0].state("g")->summary.gamma, 0.0);
  EXPECT_THROW(scenarios::constant_stark_cut(kDrivenTransmon, tiny(), {}, 0.0, {46.0}), ArgumentError);
}

TEST(Readout, CouplingSolver) {
  const int nc = 30;
  EXPECT_EQ(scenarios::solve_readout_coupling(kReadoutTransmon, nc, 46.0, 0.0), 0.0);
  const double g = scenarios::solve_readout_coupling(kReadoutTransmon, nc, 46.0, 0.001);
  EXPECT_NEAR(std::abs(scenarios::dispersive_shift(kReadoutTransmon, nc, 46.0, g)), 0.001, 1e-12);
  EXPECT_NEAR(scenarios::dispersive_shift(kReadoutTransmon, nc, 46.0, 2 * g),
              4 * scenarios::dispersive_shift(kReadoutTransmon, nc, 46.0, g), 1e-15);
  // closed form against the spectrum
  const auto es = specfn::symmetric_eig(circuits::transmon_hamiltonian(kReadoutTransmon, {circuits::Sector::Even, nc}));
  const double ge = es.values(1) - es.values(0), ef = es.values(2) - es.values(1);
  const double w2 = 46.0 * 46.0;
  const double chi = -8 * kReadoutTransmon.e_c * g * g * w2 / ((w2 - ge * ge) * (w2 - ef * ef));
  EXPECT_NEAR(scenarios::dispersive_shift(kReadoutTransmon, nc, 46.0, g), chi, 1e-15);
  EXPECT_THROW(scenarios::solve_readout_coupling(kReadoutTransmon, nc, ge + 5e-4, 0.001), ArgumentError);
}

TEST(Readout, ZeroPhotonsGiveInfiniteLifetimes) {
  const auto t = scenarios::readout_sweep(kReadoutTransmon, tiny(), {}, 25.0, 0.001, {0.0, 10.0});
  ASSERT_EQ(t.size(), 2u);
  EXPECT_TRUE(std::isinf(t[0].state("g")->summary.lifetime));
  EXPECT_TRUE(std::isinf(t[0].state("e")->summary.lifetime));
  EXPECT_GT(t[1].phi, 0.0);
  EXPECT_THROW(scenarios::readout_sweep(kReadoutTransmon, tiny(), {}, 25.0, 0.001, {10.0, 0.0}), ArgumentError);
}

TEST(Kapitza, WellStatesAtBesselZero) {
  const circuits::SquidParams p{81.6, 81.6, 0.010, 0.0, 0.5, 0.5};
  const double phi = 2 * std::numbers::pi * 0.76547;
  const auto ws = scenarios::kapitza_well_states(p, 20, phi, 10.0);
  ASSERT_EQ(ws.size(), 4u);
  const auto ops = circuits::build_charge_operators({circuits::Sector::Even, 20});
  for (const auto& w : ws) {
    ASSERT_TRUE(w.present) << w.name;
    EXPECT_NEAR(w.vector.norm(), 1.0, 1e-12);
    const double c = w.vector.dot(ops.cos_phi * w.vector);
    if (w.name == "g0" || w.name == "e0")
      EXPECT_GT(c, 0.5) << w.name;
    else
      EXPECT_LT(c, -0.5) << w.name;
  }
  // outside the coexistence window the pi well holds no bound state
  const auto lo = scenarios::kapitza_well_states(p, 20, 2 * std::numbers::pi * 0.70, 10.0);
  bool any_pi = false;
  for (const auto& w : lo)
    if ((w.name == "gpi" || w.name == "epi") && w.present) any_pi = true;
  EXPECT_FALSE(any_pi);
}

TEST(ConvergenceAudit, StaticPointHasNoDrift) {
  scenarios::AuditPoint pt;
  pt.transmon = kDrivenTransmon;
  pt.omega_d = 46.0;
  pt.amplitude = 0.0;
  auto a = tiny(), b = tiny();
  b.m_max = 10;
  const auto rep = scenarios::convergence_audit(pt, {a, b}, {});
  EXPECT_EQ(rep.gamma_drift, 0.0);
  EXPECT_LT(rep.energy_drift, 1e-12);
  EXPECT_TRUE(rep.pass);
  EXPECT_THROW(scenarios::convergence_audit(pt, {a}, {}), ArgumentError);
}

TEST(ConvergenceAudit, StarvedTruncationFails) {
  scenarios::AuditPoint pt;
  pt.transmon = kDrivenTransmon;
  pt.omega_d = 31.0;  // three-photon pair breaking
  pt.amplitude = 0.15;
  auto a = tiny(), b = tiny();
  a.m_max = 3;
  b.m_max = 4;
  a.m_guard = b.m_guard = 0;
  const auto rep = scenarios::convergence_audit(pt, {a, b}, {});
  EXPECT_FALSE(rep.pass);
  EXPECT_TRUE(rep.levels.back().truncation_warning);
}
