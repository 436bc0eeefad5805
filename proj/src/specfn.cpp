#include "qpgen/specfn.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qpgen/errors.hpp"

namespace qpgen::specfn {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

double elliptic_K(double m) {
  if (!(m < 1.0)) throw DomainError("elliptic_K: parameter m must satisfy m < 1");
  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  // AGM converges quadratically; the iteration count is tiny even for m -> 1.
  for (int it = 0; it < 64 && std::abs(a - b) > 1e-16 * a; ++it) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (2.0 * a);
}

double elliptic_E(double m) {
  if (m > 1.0) throw DomainError("elliptic_E: parameter m must satisfy m <= 1");
  if (m == 1.0) return 1.0;
  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  double weight = 0.5;
  double sum = 0.5 * m;  // 2^{-1} c_0^2 with c_0^2 = m
  for (int it = 0; it < 64; ++it) {
    const double c = 0.5 * (a - b);
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
    weight *= 2.0;
    sum += weight * c * c;
    if (std::abs(c) <= 1e-17 * a) break;
  }
  return kPi / (2.0 * a) * (1.0 - sum);
}

std::vector<double> bessel_J_sequence(int max_order, double x) {
  if (max_order < 0) throw ArgumentError("bessel_J_sequence: max_order must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double ax = std::abs(x);
  const int top = std::max(max_order, static_cast<int>(std::ceil(ax)));
  const int start = 2 * ((top + 20 + static_cast<int>(std::sqrt(160.0 * top))) / 2);

  // Miller's algorithm: downward recurrence from an arbitrary seed, normalized
  // with J_0 + 2 sum_k J_2k = 1.
  std::vector<double> t(static_cast<std::size_t>(start) + 2, 0.0);
  t[start] = 1.0;
  for (int k = start; k >= 1; --k) {
    t[k - 1] = (2.0 * k / ax) * t[k] - t[k + 1];
    if (std::abs(t[k - 1]) > 1e250) {
      for (int i = k - 1; i <= start; ++i) t[i] *= 1e-250;
    }
  }
  double norm = t[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * t[k];

  for (int k = 0; k <= max_order; ++k) {
    double v = t[k] / norm;
    if (x < 0.0 && (k % 2 == 1)) v = -v;
    out[k] = v;
  }
  return out;
}

double bessel_J(int order, double x) {
  if (order < 0) throw ArgumentError("bessel_J: order must be >= 0");
  return bessel_J_sequence(order, x)[order];
}

double bessel_J_signed(int order, double x) {
  if (order >= 0) return bessel_J(order, x);
  const double v = bessel_J(-order, x);
  return (order % 2 == 0) ? v : -v;
}

void Gap::validate() const {
  if (!(delta_ghz > 0.0) || !std::isfinite(delta_ghz))
    throw ArgumentError("Gap: delta must be positive and finite");
}

double s_ph_analytic(StructureFactorKind kind, double frequency_ghz, const Gap& gap) {
  gap.validate();
  const double z = frequency_ghz / gap.delta_ghz;
  if (!(z > 2.0)) return 0.0;
  const double k = (z - 2.0) / (z + 2.0);
  const double m = k * k;
  const double e = elliptic_E(m);
  const double kk = elliptic_K(m);
  if (kind == StructureFactorKind::Plus) return (z + 2.0) * e - 4.0 * z / (z + 2.0) * kk;
  return (z + 2.0) * e - 4.0 * kk;
}

double s_ph_quadrature(StructureFactorKind kind, double frequency_ghz, const Gap& gap,
                       double rel_tol) {
  if (!(rel_tol > 0.0)) throw ArgumentError("s_ph_quadrature: tolerance must be positive");
  gap.validate();
  const double z = frequency_ghz / gap.delta_ghz;
  if (!(z > 2.0)) return 0.0;

  // The integrand over x in [1, z-1] is symmetric under x -> z - x, so the
  // integral is twice the half [1, z/2]. With x = 1 + u^2 and w = z - 2 - u^2
  // (so z - x = 1 + w) the endpoint singularity cancels against dx = 2u du.
  const double eps = z - 2.0;
  const double upper = std::sqrt(0.5 * eps);
  const bool plus = kind == StructureFactorKind::Plus;
  auto integrand = [=](double u) {
    const double u2 = u * u;
    const double w = eps - u2;
    // x(z-x) -+ 1 expanded to avoid cancellation near threshold.
    const double num = plus ? 2.0 + u2 + w + u2 * w : u2 + w + u2 * w;
    return 2.0 * num / (std::sqrt(2.0 + u2) * std::sqrt(w * (2.0 + w)));
  };
  double err = 0.0;
  const double half = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, upper, 20, rel_tol, &err);
  return 2.0 * half;
}

}  // namespace qpgen::specfn
