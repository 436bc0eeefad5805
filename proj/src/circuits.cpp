#include "qpgen/circuits.hpp"

#include <cmath>
#include <string>

#include "qpgen/errors.hpp"
#include "qpgen/specfn.hpp"

namespace qpgen::circuits {

namespace {

// J_k(x) for k in [-k_max, k_max], indexed by k + k_max.
std::vector<double> bessel_table(int k_max, double x) {
  const auto seq = specfn::bessel_J_sequence(k_max, x);
  std::vector<double> out(static_cast<std::size_t>(2 * k_max + 1));
  for (int k = 0; k <= k_max; ++k) {
    out[static_cast<std::size_t>(k_max + k)] = seq[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(k_max - k)] = (k % 2 == 0) ? seq[k] : -seq[k];
  }
  return out;
}

RMatrix shift_matrix(int dim, int step) {
  RMatrix m = RMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const int j = i + step;
    if (j >= 0 && j < dim) m(j, i) = 1.0;
  }
  return m;
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ArgumentError(std::string(what) + " must be positive and finite");
}

}  // namespace

double ChargeBasis::charge(int index) const {
  return static_cast<double>(index - cutoff) + (sector == Sector::Odd ? 0.5 : 0.0);
}

void ChargeBasis::validate() const {
  if (cutoff < 1) throw ArgumentError("ChargeBasis: cutoff must be >= 1");
}

ChargeBasisOperators build_charge_operators(const ChargeBasis& basis) {
  basis.validate();
  const int dim = basis.dim();
  ChargeBasisOperators ops;
  ops.basis = basis;
  ops.n_op = RMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) ops.n_op(i, i) = basis.charge(i);
  ops.raise = shift_matrix(dim, 1);
  ops.cos_phi = 0.5 * (ops.raise + ops.raise.transpose());
  ops.sin_phi = (ops.raise - ops.raise.transpose()).cast<cplx>() / (2.0 * kI);
  ops.half_raise = RMatrix::Identity(dim, dim);
  ops.half_lower = shift_matrix(dim, -1);
  ops.cos_half_phi = 0.5 * (ops.half_raise + ops.half_lower);
  ops.sin_half_phi = (ops.half_raise - ops.half_lower).cast<cplx>() / (2.0 * kI);
  ops.identity = RMatrix::Identity(dim, dim);
  return ops;
}

void TransmonParams::validate() const {
  check_positive(e_j, "TransmonParams: E_J");
  check_positive(e_c, "TransmonParams: E_C");
  if (!(n_g >= 0.0 && n_g < 1.0)) throw ArgumentError("TransmonParams: n_g must lie in [0, 1)");
}

void SquidParams::validate() const {
  check_positive(e_j1, "SquidParams: E_J1");
  check_positive(e_j2, "SquidParams: E_J2");
  check_positive(e_c, "SquidParams: E_C");
  if (!(n_g >= 0.0 && n_g < 1.0)) throw ArgumentError("SquidParams: n_g must lie in [0, 1)");
  if (!std::isfinite(c1) || !std::isfinite(c2) || std::abs(c1 + c2 - 1.0) > 1e-12)
    throw ContractError("SquidParams: flux allocation requires c1 + c2 = 1");
}

RMatrix charging_term(const ChargeBasis& basis, double e_c, double n_g) {
  basis.validate();
  RMatrix h = RMatrix::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.dim(); ++i) {
    const double q = basis.charge(i) - n_g;
    h(i, i) = 4.0 * e_c * q * q;
  }
  return h;
}

RMatrix transmon_hamiltonian(const TransmonParams& p, const ChargeBasis& basis) {
  p.validate();
  const RMatrix raise = shift_matrix(basis.dim(), 1);
  return charging_term(basis, p.e_c, p.n_g) - 0.5 * p.e_j * (raise + raise.transpose());
}

RMatrix squid_hamiltonian(const SquidParams& p, const ChargeBasis& basis) {
  p.validate();
  const RMatrix raise = shift_matrix(basis.dim(), 1);
  return charging_term(basis, p.e_c, p.n_g) -
         0.5 * (p.e_j1 + p.e_j2) * (raise + raise.transpose());
}

FourierSeries junction_drive_fourier(const ChargeBasis& basis, double e_c, double n_g,
                                     const std::vector<Junction>& junctions,
                                     const FluxDrive& drive, int k_max) {
  basis.validate();
  if (k_max < 0) throw ArgumentError("junction_drive_fourier: k_max must be >= 0");
  const int dim = basis.dim();
  FourierSeries out(dim, dim, k_max);
  out[0] = charging_term(basis, e_c, n_g).cast<cplx>();
  const CMatrix raise = shift_matrix(dim, 1).cast<cplx>();
  const CMatrix lower = raise.transpose();
  for (const auto& jn : junctions) {
    const double a = jn.flux_coefficient * drive.phi_ac;
    const double b = jn.flux_coefficient * drive.phi_dc;
    const auto jk = bessel_table(k_max, a);
    const cplx rot = std::polar(1.0, b);
    for (int k = -k_max; k <= k_max; ++k) {
      const double jp = jk[static_cast<std::size_t>(k + k_max)];
      const double jm = jk[static_cast<std::size_t>(k_max - k)];
      if (jp == 0.0 && jm == 0.0) continue;
      // exact zero imaginary parts keep the real fast path available
      const cplx cp = b == 0.0 ? cplx(jp, 0.0) : jp * rot;
      const cplx cm = b == 0.0 ? cplx(jm, 0.0) : jm * std::conj(rot);
      out[k] -= 0.5 * jn.e_j * (cp * raise + cm * lower);
    }
  }
  return out;
}

FourierSeries transmon_drive_fourier(const TransmonParams& p, const ChargeBasis& basis,
                                     double phi_d, int k_max) {
  p.validate();
  if (k_max < 1) throw ArgumentError("transmon_drive_fourier: k_max must be >= 1");
  return junction_drive_fourier(basis, p.e_c, p.n_g, {Junction{p.e_j, 1.0}},
                                FluxDrive{0.0, phi_d}, k_max);
}

FourierSeries charge_drive_fourier(const RMatrix& h_q, const RMatrix& n_op, double omega) {
  if (h_q.rows() != n_op.rows() || h_q.cols() != n_op.cols() || h_q.rows() != h_q.cols())
    throw ArgumentError("charge_drive_fourier: dimension mismatch");
  const int dim = static_cast<int>(h_q.rows());
  FourierSeries out(dim, dim, 1);
  out[0] = h_q.cast<cplx>();
  out[1] = (0.5 * omega * n_op).cast<cplx>();
  out[-1] = out[1];
  return out;
}

HalfAngleSeries half_angle_fourier(int cutoff, double flux_coefficient, const FluxDrive& drive,
                                   int k_max) {
  ChargeBasis{Sector::Even, cutoff}.validate();
  if (k_max < 0) throw ArgumentError("half_angle_fourier: k_max must be >= 0");
  const int dim = 2 * cutoff + 1;
  const CMatrix up = RMatrix::Identity(dim, dim).cast<cplx>();
  const CMatrix down = shift_matrix(dim, -1).cast<cplx>();
  const double a = 0.5 * flux_coefficient * drive.phi_ac;
  const double b = 0.5 * flux_coefficient * drive.phi_dc;
  const auto jk = bessel_table(k_max, a);
  const cplx rot = std::polar(1.0, b);

  HalfAngleSeries out{FourierSeries(dim, dim, k_max), FourierSeries(dim, dim, k_max)};
  for (int k = -k_max; k <= k_max; ++k) {
    const double jp = jk[static_cast<std::size_t>(k + k_max)];
    const double jm = jk[static_cast<std::size_t>(k_max - k)];
    const cplx ep = b == 0.0 ? cplx(jp, 0.0) : jp * rot;
    const cplx em = b == 0.0 ? cplx(jm, 0.0) : jm * std::conj(rot);
    out.cos_half[k] = 0.5 * (ep * up + em * down);
    out.sin_half[k] = (ep * up - em * down) / (2.0 * kI);
  }
  return out;
}

SquidDriveSeries squid_drive_fourier(const SquidParams& p, const ChargeBasis& basis,
                                     double phi_dc, double phi_ac, int k_max) {
  p.validate();
  const FluxDrive drive{phi_dc, phi_ac};
  const Junction j1{p.e_j1, p.c1};
  const Junction j2{p.e_j2, -p.c2};
  SquidDriveSeries out;
  out.hamiltonian = junction_drive_fourier(basis, p.e_c, p.n_g, {j1, j2}, drive, k_max);
  out.junctions[0] = {p.e_j1, half_angle_fourier(basis.cutoff, j1.flux_coefficient, drive, k_max)};
  out.junctions[1] = {p.e_j2, half_angle_fourier(basis.cutoff, j2.flux_coefficient, drive, k_max)};
  return out;
}

EigenbasisOperators to_eigenbasis(const RMatrix& h_even, const ChargeBasisOperators& ops,
                                  const RMatrix& h_odd, int d) {
  const auto dim = h_even.rows();
  if (d <= 0 || d > dim) throw ArgumentError("to_eigenbasis: d must lie in [1, dim]");
  if (h_odd.rows() != dim || ops.n_op.rows() != dim)
    throw ArgumentError("to_eigenbasis: sector dimensions differ");
  const auto even = specfn::symmetric_eig(h_even);
  const auto odd = specfn::symmetric_eig(h_odd);

  EigenbasisOperators out;
  out.d = d;
  out.even_energies = even.values.head(d);
  out.odd_energies = odd.values.head(d);
  out.even_vectors = even.vectors.leftCols(d);
  out.odd_vectors = odd.vectors.leftCols(d);
  const RMatrix& ve = out.even_vectors;
  const RMatrix& vo = out.odd_vectors;
  out.n_op = ve.transpose() * ops.n_op * ve;
  out.cos_phi = ve.transpose() * ops.cos_phi * ve;
  // sin(phi) and sin(phi/2) are purely imaginary in the charge basis
  out.sin_phi = (ve.transpose() * ops.sin_phi.imag() * ve).cast<cplx>() * kI;
  out.cos_half_phi = vo.transpose() * ops.cos_half_phi * ve;
  out.sin_half_phi = (vo.transpose() * ops.sin_half_phi.imag() * ve).cast<cplx>() * kI;
  return out;
}

double kapitza_cos2_prefactor(const SquidParams& p, double phi_ac, double omega_d, int n_terms) {
  p.validate();
  if (!p.symmetric()) throw ContractError("kapitza: requires a symmetric SQUID");
  check_positive(omega_d, "kapitza: omega_d");
  if (n_terms < 1) throw ArgumentError("kapitza: n_terms must be >= 1");
  const auto jk = specfn::bessel_J_sequence(2 * n_terms, 0.5 * phi_ac);
  double sum = 0.0;
  for (int n = 1; n <= n_terms; ++n) {
    const double t = jk[static_cast<std::size_t>(2 * n)] / n;
    const double term = t * t;
    sum += term;
    if (term < 1e-14 * sum && n > 1) break;
  }
  return 4.0 * p.e_c * p.e_j1 * p.e_j1 / (omega_d * omega_d) * sum;
}

RMatrix effective_hamiltonian_kapitza(const SquidParams& p, const ChargeBasis& basis,
                                      double phi_ac, double omega_d, int n_terms) {
  const double e2 = kapitza_cos2_prefactor(p, phi_ac, omega_d, n_terms);
  const double e1 = 2.0 * p.e_j1 * specfn::bessel_J(0, 0.5 * phi_ac);
  const RMatrix r1 = shift_matrix(basis.dim(), 1);
  const RMatrix r2 = shift_matrix(basis.dim(), 2);
  return charging_term(basis, p.e_c, p.n_g) - 0.5 * e1 * (r1 + r1.transpose()) -
         0.5 * e2 * (r2 + r2.transpose());
}

double effective_potential(const SquidParams& p, double phi_ac, double omega_d, double phi,
                           int n_terms) {
  const double e2 = kapitza_cos2_prefactor(p, phi_ac, omega_d, n_terms);
  const double e1 = 2.0 * p.e_j1 * specfn::bessel_J(0, 0.5 * phi_ac);
  return -e1 * std::cos(phi) - e2 * std::cos(2.0 * phi);
}

}  // namespace qpgen::circuits
