#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ernstdisk/theta.hpp"
#include "ernstdisk/verify.hpp"

using namespace ernstdisk;

namespace {
std::mt19937_64 rng(123456u);
double uni(double a, double b) { return a + (b - a) * (static_cast<double>(rng() >> 11) * 0x1.0p-53); }
}  // namespace

TEST_CASE("theta requires Im B > 0") {
  CHECK_THROWS_AS(theta(cplx(0.1, 0.2), ThetaParams{cplx(0.3, -0.5)}), NonPositiveImB);
  CHECK_THROWS_AS(theta(cplx(0.1, 0.2), ThetaParams{cplx(0.3, 0.0)}), NonPositiveImB);
}

TEST_CASE("parity and integer periodicity are exact") {
  for (int i = 0; i < 100; ++i) {
    const ThetaParams tp{cplx(uni(-1, 1), uni(0.3, 2.5))};
    const cplx v(uni(-3, 3), uni(-2, 2));
    const cplx t = theta(v, tp);
    CHECK(std::abs(t - theta(-v, tp)) < 1e-13 * (1.0 + std::abs(t)));
    CHECK(std::abs(t - theta(v + 1.0, tp)) < 1e-13 * (1.0 + std::abs(t)));
  }
}

TEST_CASE("quasi-periodicity against brute force") {
  // oracle: plain summation with |N| <= 200 at 50 random (v, B); Im v is kept
  // inside the fundamental strip so the unreduced sum stays well conditioned
  for (int i = 0; i < 50; ++i) {
    const cplx B(uni(-1, 1), uni(0.4, 2.0));
    const ThetaParams tp{B};
    const cplx v(uni(-2, 2), uni(-0.3, 0.3) * B.imag());
    const cplx lhs = theta(v + B, tp);
    const cplx brute = brute_force_theta(v + B, B, 200);
    CHECK(std::abs(lhs - brute) < 1e-10 * (1.0 + std::abs(brute)));
    const cplx cocycle = std::exp(-2.0 * kPi * kI * (v + 0.5 * B));
    CHECK(std::abs(lhs - cocycle * theta(v, tp)) < 1e-12 * (1.0 + std::abs(lhs)));
  }
}

TEST_CASE("brute force agreement at 100 random points") {
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const cplx B(uni(-0.8, 0.8), uni(0.35, 2.2));
    const cplx v(uni(-2, 2), uni(-0.45, 0.45) * B.imag());
    worst = std::max(worst, std::abs(theta(v, ThetaParams{B}) - brute_force_theta(v, B, 200)));
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("truncation is certified by doubling") {
  for (int i = 0; i < 25; ++i) {
    const cplx B(uni(-1, 1), uni(0.3, 1.2));
    const ThetaParams tp{B};
    const cplx v(uni(-1, 1), uni(-0.4, 0.4) * B.imag());
    const auto rt = theta_reduced(v, tp);
    // resum with twice the model truncation
    cplx vr = v - std::round(v.imag() / B.imag()) * B;
    vr -= std::round(vr.real());
    cplx resum = 1.0;
    const int nmax = 2 * theta_truncation(B.imag(), std::abs(vr.imag()));
    for (int N = 1; N <= nmax; ++N) {
      const cplx common = kI * kPi * (static_cast<double>(N) * static_cast<double>(N)) * B;
      const cplx osc = 2.0 * kPi * kI * static_cast<double>(N) * vr;
      resum += std::exp(common + osc) + std::exp(common - osc);
    }
    CHECK(std::abs(resum - rt.value) < 1e-15);
  }
}

TEST_CASE("lower bound from the geometric tail") {
  const cplx B(0.13, 0.9);
  const double q = std::abs(std::exp(kI * kPi * B));
  const double bound = 1.0 - 2.0 * q / (1.0 - q);
  CHECK(std::abs(theta(cplx(0, 0), ThetaParams{B})) >= bound);
}

TEST_CASE("reduced ratio") {
  const ThetaParams tp{cplx(0.21, 0.77)};
  const cplx v(0.3, 0.2);
  CHECK(std::abs(theta_ratio_reduced(v, v, tp) - 1.0) < 1e-15);
  // shifting the numerator argument by B multiplies by the exact cocycle
  const cplx ratio0 = theta_ratio_reduced(v, cplx(0.1, -0.1), tp);
  const cplx ratio1 = theta_ratio_reduced(v + tp.B, cplx(0.1, -0.1), tp);
  const cplx cocycle = std::exp(-2.0 * kPi * kI * (v + 0.5 * tp.B));
  CHECK(std::abs(ratio1 - cocycle * ratio0) < 1e-12 * (1.0 + std::abs(ratio1)));
  // a zero of theta sits at the odd half period
  CHECK_THROWS_AS(theta_ratio_reduced(v, 0.5 * (1.0 + tp.B), tp), ThetaZeroDenominator);
}

TEST_CASE("arguments with huge imaginary part reduce without overflow") {
  const ThetaParams tp{cplx(0.4, 1.1)};
  const cplx v(0.37, 57.3);
  const auto rt = theta_reduced(v, tp);
  CHECK(std::isfinite(rt.value.real()));
  CHECK(std::abs(rt.value) < 3.0);
  // consistency with a moderately shifted copy evaluated plainly
  const cplx v2 = v - 52.0 * tp.B;
  const cplx direct = theta(v2, tp);
  const cplx via = std::exp(rt.log_factor + 2.0 * kPi * kI * (52.0 * (v - 52.0 * tp.B) + 0.5 * 52.0 * 52.0 * tp.B)) *
                   rt.value;
  CHECK(std::abs(via - direct) < 1e-10 * (1.0 + std::abs(direct)));
}
