#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "ernstdisk/errors.hpp"
#include "ernstdisk/quadrature.hpp"

namespace ernstdisk {

// Genus-1 Riemann-Siegel theta function
//   Theta(v|B) = sum_N exp[2 pi i (N^2 B / 2 + N v)],  Im B > 0.

struct ThetaParams {
  cplx B;
};

inline void require_positive_imB(cplx B) {
  if (!(B.imag() > 0.0)) throw NonPositiveImB("theta period must have positive imaginary part");
}

// Smallest N with exp(-pi b N^2 + 2 pi a N) below the target tail, plus margin.
inline int theta_truncation(double im_B, double abs_im_v, double log_tail = 39.14) {
  const double a = abs_im_v, b = im_B;
  const double n = (kPi * a + std::sqrt(kPi * kPi * a * a + kPi * b * log_tail)) / (kPi * b);
  const int nmax = static_cast<int>(std::ceil(n)) + 5;
  if (nmax > 200000) throw NonConvergence("theta series truncation bound too large (Im B = " + std::to_string(b) + ")");
  return nmax;
}

// Theta with the argument reduced into the fundamental cell |Im v| <= Im B / 2.
// Theta(v|B) = exp(log_factor) * value, with the cocycle carried exactly in
// log form so that ratios of thetas with large arguments never overflow.
struct ReducedTheta {
  cplx value;
  cplx log_factor;
};

inline ReducedTheta theta_reduced(cplx v, const ThetaParams& tp) {
  const cplx B = tp.B;
  require_positive_imB(B);
  const double n = std::round(v.imag() / B.imag());
  cplx vr = v - n * B;
  vr -= std::round(vr.real());
  // Theta(vr + m + nB) = exp(-2 pi i (n vr + n^2 B / 2)) Theta(vr)
  const cplx log_factor = -2.0 * kPi * kI * (n * vr + 0.5 * n * n * B);
  const int nmax = theta_truncation(B.imag(), std::abs(vr.imag()));
  cplx sum = 1.0;
  for (int N = 1; N <= nmax; ++N) {
    const cplx common = kI * kPi * (static_cast<double>(N) * static_cast<double>(N)) * B;
    const cplx osc = 2.0 * kPi * kI * static_cast<double>(N) * vr;
    sum += std::exp(common + osc) + std::exp(common - osc);
  }
  return {sum, log_factor};
}

inline cplx theta(cplx v, const ThetaParams& tp) {
  const ReducedTheta t = theta_reduced(v, tp);
  return std::exp(t.log_factor) * t.value;
}

// Theta(v1|B)/Theta(v2|B) via lattice-reduced arguments and exact cocycles.
inline cplx theta_ratio_reduced(cplx v1, cplx v2, const ThetaParams& tp) {
  const ReducedTheta a = theta_reduced(v1, tp);
  const ReducedTheta b = theta_reduced(v2, tp);
  if (std::abs(b.value) < 1e-10)
    throw ThetaZeroDenominator("theta denominator on the theta divisor");
  return std::exp(a.log_factor - b.log_factor) * (a.value / b.value);
}

}  // namespace ernstdisk
