#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qpgen/errors.hpp"
#include "qpgen/floquet.hpp"
#include "qpgen/labeling.hpp"
#include "qpgen/scenarios.hpp"

using namespace qpgen;
using floquet::StateLabel;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOmegaD = 5.059;

scenarios::Numerics small_numerics(int m_max) {
  scenarios::Numerics n;
  n.charge_cutoff = 20;
  n.levels = 8;
  n.m_max = m_max;
  n.m_guard = 2;
  return n;
}

const scenarios::TransmonDrive& label_drive() {
  static const scenarios::TransmonDrive d({30.0, 0.15, 0.0}, small_numerics(6));
  return d;
}

double nearest(const RVector& sorted, double x) {
  const double* b = sorted.data();
  const double* e = b + sorted.size();
  const double* it = std::lower_bound(b, e, x);
  double best = INFINITY;
  if (it != e) best = std::min(best, std::abs(*it - x));
  if (it != b) best = std::min(best, std::abs(*(it - 1) - x));
  return best;
}

}  // namespace

TEST(Floquet, ZeroDriveReplicaSpectrum) {
  const auto& d = label_drive();
  const auto prob = d.lab_problem(0.0, kOmegaD);
  const auto basis = floquet::diagonalize(prob);
  const RVector& e = d.eig().even_energies;
  std::vector<double> ref;
  for (int m = -prob.m_max; m <= prob.m_max; ++m)
    for (int a = 0; a < prob.base_dim(); ++a) ref.push_back(e(a) + m * kOmegaD);
  std::sort(ref.begin(), ref.end());
  ASSERT_EQ(static_cast<int>(ref.size()), basis.size());
  for (int j = 0; j < basis.size(); ++j) EXPECT_NEAR(basis.energy(j), ref[j], 1e-9);
  // unit eigenvectors: mean photon index is an exact integer, no edge weight
  for (int j = 0; j < basis.size(); ++j) {
    const double m = basis.mean_photon(j);
    EXPECT_NEAR(m, std::round(m), 1e-12);
  }
}

TEST(Floquet, BlockStructureAndHermiticity) {
  const auto& d = label_drive();
  const auto prob = d.lab_problem(0.8, kOmegaD);
  const CMatrix h = floquet::build_floquet(prob);
  EXPECT_LE(max_abs(CMatrix(h - h.adjoint())), 1e-12 * max_abs(h));
  const int n = prob.base_dim();
  for (int mp = -prob.m_max; mp <= prob.m_max; ++mp)
    for (int m = -prob.m_max; m <= prob.m_max; ++m) {
      CMatrix ref = prob.series[mp - m];
      if (mp == m) ref += CMatrix::Identity(n, n) * (m * kOmegaD);
      const CMatrix blk = h.block(prob.index(0, mp), prob.index(0, m), n, n);
      EXPECT_EQ(max_abs(CMatrix(blk - ref)), 0.0);
    }
}

TEST(Floquet, InteriorReplicaInvariance) {
  const scenarios::TransmonDrive d({30.0, 0.15, 0.0}, small_numerics(14));
  const auto basis = floquet::diagonalize(d.lab_problem(0.6, kOmegaD));
  const RVector& e = basis.energies();
  int checked = 0;
  for (int j = 0; j < basis.size(); ++j) {
    if (basis.edge_weight(j, 4) > 1e-10) continue;
    EXPECT_LT(nearest(e, e(j) + kOmegaD), 1e-6) << "j=" << j;
    EXPECT_LT(nearest(e, e(j) - kOmegaD), 1e-6) << "j=" << j;
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(Floquet, Validation) {
  FourierSeries s(2, 2, 1);
  s[0] = CMatrix::Identity(2, 2);
  EXPECT_THROW((floquet::FloquetProblem{s, 0.0, 2}.validate()), ArgumentError);
  EXPECT_THROW((floquet::FloquetProblem{s, 1.0, 0}.validate()), ArgumentError);
  s[1](0, 1) = 0.3;  // no matching H^(-1)
  EXPECT_THROW((floquet::FloquetProblem{s, 1.0, 2}.validate()), ContractError);
  FourierSeries r(2, 3, 1);
  EXPECT_THROW((floquet::FloquetProblem{r, 1.0, 2}.validate()), ArgumentError);
  EXPECT_THROW(floquet::build_floquet(label_drive().lab_problem(0.1, kOmegaD), 50), ResourceError);
}

TEST(Floquet, ModeProjection) {
  const auto& d = label_drive();
  const auto prob = d.lab_problem(0.0, kOmegaD);
  const auto basis = floquet::diagonalize(prob);
  // find (alpha, m) = (2, 3)
  const int target = prob.index(2, 3);
  int col = -1;
  for (int j = 0; j < basis.size(); ++j)
    if (std::abs(basis.vector(j)(target)) > 0.5) col = j;
  ASSERT_GE(col, 0);
  for (double th : {0.0, 0.4, 2.0}) {
    const CVector p = floquet::project_mode(basis.vector(col), prob.base_dim(), prob.m_max, th);
    CVector ref = CVector::Zero(prob.base_dim());
    ref(2) = std::exp(cplx(0.0, 3.0 * th)) * basis.vector(col)(target);
    EXPECT_LT(max_abs(CVector(p - ref)), 1e-14);
  }
}

TEST(Floquet, ProjectionNormAveragedOverPhase) {
  const scenarios::TransmonDrive d({30.0, 0.15, 0.0}, small_numerics(14));
  const auto prob = d.lab_problem(0.5, kOmegaD);
  const auto basis = floquet::diagonalize(prob);
  for (int j = 0; j < basis.size(); j += 7) {
    if (basis.edge_weight(j, 4) > 1e-10) continue;
    double avg = 0.0;
    const int n = 64;
    for (int s = 0; s < n; ++s)
      avg += floquet::project_mode(basis.vector(j), prob.base_dim(), prob.m_max, 2 * kPi * s / n)
                 .squaredNorm();
    EXPECT_NEAR(avg / n, 1.0, 1e-8);
  }
}

TEST(Labeling, ZeroDriveIsIdentity) {
  const auto& d = label_drive();
  const auto prob = d.lab_problem(0.0, kOmegaD);
  const auto basis = floquet::diagonalize(prob);
  floquet::Labeler lab(prob.base_dim(), prob.m_max,
                       floquet::Labeler::all_states(prob.base_dim(), prob.m_max));
  const auto res = lab.step(basis);
  for (std::size_t t = 0; t < lab.tracked().size(); ++t) {
    const auto& s = lab.tracked()[t];
    EXPECT_NEAR(std::abs(basis.vector(res.index[t])(prob.index(s.alpha, s.m))), 1.0, 1e-14);
    EXPECT_EQ(res.ambiguous[t], 0);
  }
  std::vector<int> cols = res.index;
  std::sort(cols.begin(), cols.end());
  EXPECT_TRUE(std::adjacent_find(cols.begin(), cols.end()) == cols.end());
}

TEST(Labeling, MustStartNearZeroDrive) {
  const auto& d = label_drive();
  const auto prob = d.lab_problem(2.0, kOmegaD);
  floquet::Labeler lab(prob.base_dim(), prob.m_max, {{0, 0}});
  EXPECT_THROW(lab.step(floquet::diagonalize(prob)), ContractError);
}

TEST(Labeling, StarkShiftIsQuadraticAtWeakDrive) {
  const auto& d = label_drive();
  const std::vector<double> amps{0.0, 0.002, 0.004};
  const auto spectrum = floquet::label_sweep(
      amps, [&](double a) { return d.lab_problem(a, kOmegaD); }, {{0, 0}, {1, 0}});
  const double gap = d.eig().even_energies(1) - d.eig().even_energies(0);
  EXPECT_NEAR(floquet::stark_shift(spectrum, 0, gap), 0.0, 1e-12);
  const double s1 = floquet::stark_shift(spectrum, 1, gap);
  const double s2 = floquet::stark_shift(spectrum, 2, gap);
  EXPECT_NE(s1, 0.0);
  EXPECT_NEAR(s2 / s1, 4.0, 0.2);
  const auto missing = floquet::label_sweep(
      {0.0}, [&](double a) { return d.lab_problem(a, kOmegaD); }, {{0, 0}});
  EXPECT_THROW(floquet::stark_shift(missing, 0, gap), ArgumentError);
}

TEST(Labeling, SmoothAwayFromResonancesAndDeterministic) {
  const auto& d = label_drive();
  std::vector<double> amps;
  for (int i = 0; i <= 60; ++i) amps.push_back(0.005 * i);
  auto run = [&] {
    return floquet::label_sweep(amps, [&](double a) { return d.lab_problem(a, kOmegaD); },
                                {{0, 0}});
  };
  const auto a = run();
  const auto b = run();
  EXPECT_DOUBLE_EQ(a.points[0].labels.bare_overlap[0], 1.0);
  for (std::size_t i = 1; i < a.points.size(); ++i) {
    EXPECT_LT(std::abs(a.points[i].labels.bare_overlap[0] - a.points[i - 1].labels.bare_overlap[0]),
              0.1);
    EXPECT_EQ(a.points[i].labels.index, b.points[i].labels.index);
    EXPECT_EQ(a.points[i].energies(0), b.points[i].energies(0));
  }
}
