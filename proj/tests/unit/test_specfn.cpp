#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "qpgen/errors.hpp"
#include "qpgen/specfn.hpp"

using namespace qpgen;
using specfn::StructureFactorKind;

namespace {

constexpr double kPi = std::numbers::pi;

double quad_K(double m) {
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate([m](double t) { return 1.0 / std::sqrt(1.0 - m * std::sin(t) * std::sin(t)); },
                     0.0, kPi / 2);
}

double quad_E(double m) {
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate([m](double t) { return std::sqrt(1.0 - m * std::sin(t) * std::sin(t)); }, 0.0,
                     kPi / 2);
}

// x = 1 + (z-2)(1 - cos t)/2 cancels both inverse square roots, leaving a
// smooth integrand on [0, pi].
double s_oracle(StructureFactorKind kind, double z) {
  if (z <= 2.0) return 0.0;
  const double sgn = kind == StructureFactorKind::Plus ? 1.0 : -1.0;
  boost::math::quadrature::tanh_sinh<double> q;
  auto f = [&](double t) {
    const double x = 1.0 + (z - 2.0) * (1.0 - std::cos(t)) / 2.0;
    return (x * (z - x) + sgn) / std::sqrt((x + 1.0) * (z - x + 1.0));
  };
  return q.integrate(f, 0.0, kPi);
}

double s(StructureFactorKind kind, double z) {
  return specfn::s_ph_analytic(kind, z * 45.0, specfn::Gap{45.0});
}

CMatrix random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  CMatrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = {d(rng), d(rng)};
  return (a + a.adjoint()) / 2.0;
}

}  // namespace

TEST(Elliptic, MatchesIntegralDefinition) {
  for (double m : {-2.0, -1.0, 0.0, 0.25, 0.5, 0.9, 0.99}) {
    EXPECT_NEAR(specfn::elliptic_K(m), quad_K(m), 1e-10 * quad_K(m)) << "m=" << m;
    EXPECT_NEAR(specfn::elliptic_E(m), quad_E(m), 1e-10 * quad_E(m)) << "m=" << m;
  }
}

TEST(Elliptic, MatchesModulusConvention) {
  for (double m : {0.1, 0.5, 0.95}) {
    EXPECT_NEAR(specfn::elliptic_K(m), boost::math::ellint_1(std::sqrt(m)), 4e-13);
    EXPECT_NEAR(specfn::elliptic_E(m), boost::math::ellint_2(std::sqrt(m)), 4e-13);
  }
  EXPECT_DOUBLE_EQ(specfn::elliptic_E(1.0), 1.0);
}

TEST(Elliptic, DomainErrors) {
  EXPECT_THROW(specfn::elliptic_K(1.0), DomainError);
  EXPECT_THROW(specfn::elliptic_K(2.0), DomainError);
  EXPECT_THROW(specfn::elliptic_E(1.5), DomainError);
}

TEST(Bessel, MatchesStandardLibrary) {
  for (int n : {0, 1, 2, 5, 12, 30})
    for (double x : {0.0, 0.1, 1.0, 2.4, 7.5, 10.0, 40.0})
      EXPECT_NEAR(specfn::bessel_J(n, x), std::cyl_bessel_j(double(n), x), 1e-13)
          << "n=" << n << " x=" << x;
}

TEST(Bessel, IntegralRepresentation) {
  boost::math::quadrature::tanh_sinh<double> q;
  const double ref =
      q.integrate([](double t) { return std::cos(2.0 * t - std::sin(t)); }, 0.0, kPi) / kPi;
  EXPECT_NEAR(specfn::bessel_J(2, 1.0), ref, 1e-13);
}

TEST(Bessel, FirstZeroByBisection) {
  EXPECT_EQ(specfn::bessel_J(0, 0.0), 1.0);
  double a = 2.0, b = 3.0;
  for (int i = 0; i < 200 && b - a > 1e-15; ++i) {
    const double c = 0.5 * (a + b);
    (specfn::bessel_J(0, a) * specfn::bessel_J(0, c) <= 0.0 ? b : a) = c;
  }
  EXPECT_NEAR(0.5 * (a + b), 2.404825557695773, 1e-12);
  EXPECT_NEAR(specfn::bessel_J(0, 2.404825557695773), 0.0, 1e-14);
}

TEST(Bessel, SignedOrderAndSequence) {
  for (int k = 1; k < 6; ++k)
    EXPECT_DOUBLE_EQ(specfn::bessel_J_signed(-k, 3.3), (k % 2 ? -1.0 : 1.0) * specfn::bessel_J(k, 3.3));
  const auto seq = specfn::bessel_J_sequence(40, 10.0);
  ASSERT_EQ(seq.size(), 41u);
  for (int k = 0; k <= 40; ++k) EXPECT_NEAR(seq[k], std::cyl_bessel_j(double(k), 10.0), 1e-13);
}

TEST(Bessel, JacobiAngerReconstruction) {
  for (double x : {0.5, 2.4, 10.0}) {
    const int kmax = static_cast<int>(std::ceil(x)) + 20;
    double worst = 0.0;
    for (int s = 0; s < 64; ++s) {
      const double th = 2.0 * kPi * s / 64;
      cplx sum = 0.0;
      for (int k = -kmax; k <= kmax; ++k)
        sum += specfn::bessel_J_signed(k, x) * std::exp(cplx(0.0, k * th));
      worst = std::max(worst, std::abs(sum - std::exp(cplx(0.0, x * std::sin(th)))));
    }
    EXPECT_LT(worst, 1e-10) << "x=" << x;
  }
}

TEST(StructureFactor, AnalyticMatchesQuadrature) {
  const specfn::Gap gap;
  for (double z : {2.01, 2.1, 2.5, 3.0, 5.0, 10.0}) {
    for (auto kind : {StructureFactorKind::Plus, StructureFactorKind::Minus}) {
      const double a = specfn::s_ph_analytic(kind, z * gap.delta_ghz, gap);
      const double q = specfn::s_ph_quadrature(kind, z * gap.delta_ghz, gap);
      const double o = s_oracle(kind, z);
      EXPECT_NEAR(a, q, 1e-6 * std::abs(q)) << "z=" << z;
      EXPECT_NEAR(a, o, 1e-8 * std::abs(o)) << "z=" << z;
    }
  }
}

TEST(StructureFactor, ThresholdLimits) {
  EXPECT_NEAR(s(StructureFactorKind::Plus, 2.000001), kPi, 1e-3);
  EXPECT_NEAR(s(StructureFactorKind::Minus, 2.000001), 0.0, 1e-3);
  EXPECT_NEAR(s_oracle(StructureFactorKind::Plus, 2.000001), kPi, 1e-3);
  EXPECT_EQ(s(StructureFactorKind::Plus, 1.0), 0.0);
  EXPECT_EQ(s(StructureFactorKind::Plus, 1.99), 0.0);
  EXPECT_EQ(s(StructureFactorKind::Minus, 2.0), 0.0);
  EXPECT_EQ(specfn::s_ph_quadrature(StructureFactorKind::Plus, 1.99 * 45, specfn::Gap{}), 0.0);
}

TEST(StructureFactor, NonnegativeAndNondecreasing) {
  for (auto kind : {StructureFactorKind::Plus, StructureFactorKind::Minus}) {
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
      const double v = s(kind, 2.0 + 8.0 * i / 100);
      EXPECT_GE(v, 0.0);
      EXPECT_GE(v, prev - 1e-12);
      prev = v;
    }
  }
}

TEST(StructureFactor, ArgumentErrors) {
  EXPECT_THROW(specfn::s_ph_quadrature(StructureFactorKind::Plus, 100, specfn::Gap{}, 0.0),
               ArgumentError);
  EXPECT_THROW(specfn::s_ph_analytic(StructureFactorKind::Plus, 100, specfn::Gap{0.0}),
               ArgumentError);
}

TEST(HermitianEig, SmallCases) {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 1.0;
  const auto es = specfn::hermitian_eig(d);
  EXPECT_DOUBLE_EQ(es.values(0), 1.0);
  EXPECT_DOUBLE_EQ(es.values(1), 2.0);
  EXPECT_NEAR(std::abs(es.vectors(1, 0)), 1.0, 1e-15);

  CMatrix x = CMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  const auto px = specfn::hermitian_eig(x);
  EXPECT_NEAR(px.values(0), -1.0, 1e-15);
  EXPECT_NEAR(px.values(1), 1.0, 1e-15);
  EXPECT_NEAR(px.vectors(0, 0).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(px.vectors(1, 0).real(), -1.0 / std::sqrt(2.0), 1e-15);
}

TEST(HermitianEig, RandomResidualAndOrthonormality) {
  std::mt19937_64 rng(7);
  for (int n : {4, 50, 400}) {
    const CMatrix h = random_hermitian(n, rng);
    const auto es = specfn::hermitian_eig(h);
    const CMatrix r = h * es.vectors - es.vectors * es.values.cast<cplx>().asDiagonal();
    EXPECT_LT(max_abs(r), 1e-9 * std::max(1.0, max_abs(h))) << "n=" << n;
    const CMatrix g = es.vectors.adjoint() * es.vectors - CMatrix::Identity(n, n);
    EXPECT_LT(max_abs(g), 1e-10) << "n=" << n;
    for (int i = 1; i < n; ++i) EXPECT_LE(es.values(i - 1), es.values(i));
  }
}

TEST(HermitianEig, RealSymmetricPath) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> d;
  RMatrix a(200, 200);
  for (int j = 0; j < 200; ++j)
    for (int i = 0; i < 200; ++i) a(i, j) = d(rng);
  const RMatrix h = (a + a.transpose()) / 2.0;
  const auto es = specfn::symmetric_eig(h);
  EXPECT_LT(max_abs(RMatrix(h * es.vectors - es.vectors * es.values.asDiagonal())), 1e-10 * max_abs(h) * 200);
  RMatrix w = h;
  const RVector vals = specfn::symmetric_eig_inplace(w);
  EXPECT_LT((vals - es.values).cwiseAbs().maxCoeff(), 1e-12 * es.values.cwiseAbs().maxCoeff());
}

TEST(HermitianEig, RejectsNonHermitian) {
  CMatrix h = CMatrix::Identity(3, 3);
  h(0, 1) = 0.5;
  EXPECT_THROW(specfn::hermitian_eig(h), ContractError);
}
