#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "ernstdisk/errors.hpp"
#include "ernstdisk/quadrature.hpp"
#include "ernstdisk/surface.hpp"

namespace ernstdisk {

// Boundary data h(k) = -arcsin(2 i omega k)/pi: smooth, real and odd on
// Gamma = [-i rho0, i rho0].
inline cplx h_of_k(const DiskParams& P, cplx k) {
  const cplx w = 2.0 * kI * P.omega * k;
  if (w.imag() == 0.0 && std::abs(w.real()) > 1.0)
    throw OnArcsinCut("h(k): argument on the arcsin branch cut");
  return -std::asin(w) / kPi;
}

namespace spdetail {

// Cauchy transform C(k) = int_Gamma h(s)/mu(s^+) ds/(s - k) for k off Gamma.
// Near the contour endpoints the nonvanishing endpoint density is subtracted
// and integrated in closed form (Cauchy-log term), leaving a bounded kernel.
inline cplx gamma_cauchy(const DiskParams& P, cplx k, const QuadratureOptions& opt) {
  const double r0 = P.rho0;
  const cplx top = cplx(0.0, r0), bot = cplx(0.0, -r0);
  Contour gamma{bot, cplx(0.0, 0.0), top};
  auto density = [&P](cplx s) { return h_of_k(P, s) / mu_upper(P, s); };
  const double d_top = std::abs(k - top), d_bot = std::abs(k - bot);
  const double near = 0.05 * r0;
  if (d_top > near && d_bot > near) {
    return integrate([&](cplx s) { return density(s) / (s - k); }, gamma, opt).value;
  }
  const cplx e = (d_top < d_bot) ? top : bot;
  const cplx ge = density(e);
  const cplx smooth = integrate([&](cplx s) { return (density(s) - ge) / (s - k); }, gamma, opt).value;
  return smooth + ge * log_ratio_along_segment(bot, top, k);
}

}  // namespace spdetail

// E(k) = exp( mu(k) int_Gamma h(s)/mu(s^+) ds/(s-k) ) on the degenerate
// surface, analytic off Gamma^+- with E(inf^+) = 1 and E(k^+) E(k^-) = 1.
inline cplx E_of_k(const DiskParams& P, const SheetedPoint& p, const QuadratureOptions& opt = {}) {
  if (std::abs(p.k.real()) < 1e-13 && std::abs(p.k.imag()) <= P.rho0 + 1e-13)
    throw std::invalid_argument("E_of_k: point on Gamma; use E_boundary");
  const cplx mu = mu_eval(DegenerateSurface(P), p);
  return std::exp(mu * spdetail::gamma_cauchy(P, p.k, opt));
}

// Boundary values of E on Gamma^+ from the two sides of Gamma (first: right
// side, second: left side), via the Plemelj split of the Cauchy transform.
inline std::pair<cplx, cplx> E_boundary(const DiskParams& P, cplx k0, const QuadratureOptions& opt = {}) {
  const double r0 = P.rho0;
  Contour gamma{cplx(0.0, -r0), cplx(0.0, r0)};
  const cplx mu0 = mu_upper(P, k0);
  auto f = [&P, k0](cplx s) { return h_of_k(P, s) / mu_upper(P, s) / (s - k0); };
  const cplx res = h_of_k(P, k0) / mu0;
  const cplx pv = integrate_pv(f, gamma, k0, opt, res).value;
  const cplx jump = kPi * kI * h_of_k(P, k0);
  return {std::exp(mu0 * pv - jump), std::exp(mu0 * pv + jump)};
}

// d1(k) = 2 i omega (k - mu(k)): simple zero at inf^+, simple pole at inf^-,
// |d1| = 1 on Gamma^+-, d1(k^+) d1(k^-) = 1.
inline cplx d1_of_k(const DiskParams& P, const SheetedPoint& p) {
  return 2.0 * P.omega * kI * (p.k - mu_eval(DegenerateSurface(P), p));
}

struct SpectralValue {
  cplx k;
  cplx F;
  cplx G;
};

// Closed-form spectral functions on the cut plane (values taken at k^+).
inline SpectralValue FG_of_k(const DiskParams& P, cplx k, const QuadratureOptions& opt = {}) {
  const SheetedPoint kp{k, Sheet::upper};
  const cplx mu = mu_upper(P, k);
  const cplx E = E_of_k(P, kp, opt);
  const cplx d1 = d1_of_k(P, kp);
  const cplx pref = kI / (4.0 * P.omega * mu);
  return {k, pref * (d1 / E - E / d1), pref * (1.0 / E - E)};
}

// ---------------------------------------------------------------------------
// Axis quantities
// ---------------------------------------------------------------------------

struct AxisData {
  double zeta;
  double Jprime;
  cplx d;       // purely imaginary, negative imaginary part
  cplx Kprime;  // int_{k1}^{inf^-} omega'_{zeta+ zeta-}
};

namespace spdetail {

// J'(zeta) = mu(zeta^+) int_Gamma h(s)/mu(s^+) ds/(s - zeta); the integrand is
// regular on Gamma for zeta > 0 and has a removable point at s = 0 when
// zeta = 0 (h vanishes there).
inline double jprime(const DiskParams& P, double zeta, const QuadratureOptions& opt) {
  const double mu_z = std::hypot(zeta, P.half_gap());
  Contour gamma{cplx(0.0, -P.rho0), cplx(0.0, 0.0), cplx(0.0, P.rho0)};
  const cplx v = integrate([&P, zeta](cplx s) { return h_of_k(P, s) / mu_upper(P, s) / (s - zeta); },
                           gamma, opt)
                     .value;
  return (mu_z * v).real();
}

inline cplx kprime(const DiskParams& P, double zeta, const QuadratureOptions& opt) {
  // path from k1 east then a ray to infinity, entirely on the lower sheet;
  // stays clear of the pole at k = zeta on the positive real axis.  The
  // graded leg at k1 hands the exact offset to mu.
  const double b = P.half_gap();
  const double mu_z = std::hypot(zeta, b);
  const cplx w = cplx(zeta + b + 2.0, -b);
  const sdetail::YLeg lane{P.k1, w, sdetail::BranchId::k1, sdetail::BranchId::none, true, false};
  cplx v = sdetail::integrate_offset_legs(
               {lane},
               [&](cplx k, sdetail::BranchId bp, cplx delta) {
                 const cplx mu = (bp == sdetail::BranchId::none)
                                     ? mu_upper(P, k)
                                     : mu_upper_offset(P, delta, bp == sdetail::BranchId::k1bar);
                 return mu_z / ((k - zeta) * (-mu));
               },
               opt)
               .value;
  auto density = [&P, mu_z, zeta](cplx k) { return mu_z / ((k - zeta) * (-mu_upper(P, k))); };
  v += integrate_ray(density, w, opt).value;
  return v;
}

}  // namespace spdetail

inline AxisData axis_data(const DiskParams& P, double zeta, const QuadratureOptions& opt = {}) {
  if (zeta < 0.0) throw std::invalid_argument("axis_data expects zeta >= 0");
  const double mu_z = std::hypot(zeta, P.half_gap());
  AxisData a;
  a.zeta = zeta;
  a.Jprime = spdetail::jprime(P, zeta, opt);
  a.d = 2.0 * kI * P.omega * (zeta - mu_z);
  a.Kprime = spdetail::kprime(P, zeta, opt);
  return a;
}

// Ernst potential on the rotation axis.  zeta = 0 gives the disk-center value
// approached from above; negative zeta uses the reciprocal form and satisfies
// f(-i zeta) = conj f(i zeta).
inline cplx axis_f(const DiskParams& P, double zeta, const QuadratureOptions& opt = {}) {
  if (zeta >= 0.0) {
    const double J = spdetail::jprime(P, zeta, opt);
    const cplx d = 2.0 * kI * P.omega * (zeta - std::hypot(zeta, P.half_gap()));
    const double eJ = std::exp(J);
    return (1.0 + eJ * d) / (eJ + d);
  }
  const SheetedPoint zp{cplx(zeta, 0.0), Sheet::upper};
  const cplx E = E_of_k(P, zp, opt);
  const cplx d1 = d1_of_k(P, zp);
  return (d1 + E) / (1.0 + d1 * E);
}

// e^{2U} on the axis: (1 - d^2) e^{J'} / (e^{2J'} - d^2) = Re f(i zeta).
inline double axis_e2U(const DiskParams& P, double zeta, const QuadratureOptions& opt = {}) {
  const double J = spdetail::jprime(P, std::abs(zeta), opt);
  const cplx d = 2.0 * kI * P.omega * (std::abs(zeta) - std::hypot(zeta, P.half_gap()));
  const double d2 = (d * d).real();  // d^2 is real (d purely imaginary)
  return (1.0 - d2) * std::exp(J) / (std::exp(2.0 * J) - d2);
}

}  // namespace ernstdisk
