#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ernstdisk/spectral.hpp"

using namespace ernstdisk;

namespace {
const DiskParams P(1.0, 0.3);
const QuadratureOptions qo = [] {
  QuadratureOptions o;
  o.abs_tol = 1e-12;
  return o;
}();
std::mt19937_64 rng(4242u);
double uni(double a, double b) { return a + (b - a) * (static_cast<double>(rng() >> 11) * 0x1.0p-53); }
cplx random_off_axis() {
  while (true) {
    const cplx k(uni(-2.5, 2.5), uni(-2.5, 2.5));
    if (std::abs(k.real()) < 0.1 || std::abs(k.real() + 1.0) < 0.05) continue;
    if (std::abs(std::abs(k.imag()) - P.half_gap()) < 0.05) continue;
    return k;
  }
}
}  // namespace

TEST_CASE("h values and symmetry") {
  CHECK(std::abs(h_of_k(P, cplx(0, 0))) == 0.0);
  CHECK(std::abs(h_of_k(P, P.k1) + 0.5) < 1e-15);
  // independent arcsin oracle: Newton iteration on sin x = 0.6
  double x = 0.6;
  for (int i = 0; i < 50; ++i) x -= (std::sin(x) - 0.6) / std::cos(x);
  CHECK(std::abs(h_of_k(P, cplx(0, 1.0)) - x / kPi) < 1e-14);
  CHECK(std::abs(x / kPi - 0.2048328) < 1e-7);  // frozen reference
  for (int i = 0; i < 30; ++i) {
    const cplx k = 0.5 * random_off_axis();
    CHECK(std::abs(h_of_k(P, k) + h_of_k(P, -k)) < 1e-15);
  }
  // real on Gamma
  for (double t : {-0.9, -0.3, 0.4, 0.85}) CHECK(std::abs(h_of_k(P, cplx(0, t)).imag()) < 1e-15);
  CHECK_THROWS_AS(h_of_k(P, cplx(0, 2.5)), OnArcsinCut);
}

TEST_CASE("E: asymptotics, sheets, axis value") {
  CHECK(std::abs(E_of_k(P, {cplx(1e6, 0), Sheet::upper}, qo) - 1.0) < 1e-5);
  for (int i = 0; i < 10; ++i) {
    const cplx k = random_off_axis();
    const cplx ep = E_of_k(P, {k, Sheet::upper}, qo);
    const cplx em = E_of_k(P, {k, Sheet::lower}, qo);
    CHECK(std::abs(ep * em - 1.0) < 1e-11);
    // conjugation symmetry E(conj k ^+) = conj E(k^+)
    const cplx ec = E_of_k(P, {std::conj(k), Sheet::upper}, qo);
    CHECK(std::abs(ec - std::conj(ep)) < 1e-11);
  }
  // E(zeta^+) = e^{J'} on the positive real axis
  const auto ad = axis_data(P, 1.0, qo);
  CHECK(std::abs(E_of_k(P, {cplx(1.0, 0), Sheet::upper}, qo) - std::exp(ad.Jprime)) < 1e-11);
}

TEST_CASE("Cauchy transform: endpoint-subtracted route matches a split plain route") {
  // inside the switch radius the endpoint density is subtracted and its
  // Cauchy-log term added in closed form; cross-check against brute refinement
  const cplx k(0.03, 1.0);
  const cplx c_sub = spdetail::gamma_cauchy(P, k, qo);
  QuadratureOptions qt;
  qt.abs_tol = 1e-14;
  qt.max_evals = 10'000'000;
  Contour g2{cplx(0, -1), cplx(0, 0), cplx(0, 0.9), cplx(0, 0.97), cplx(0, 0.99), cplx(0, 1)};
  const cplx c_plain =
      integrate([&](cplx s) { return h_of_k(P, s) / mu_upper(P, s) / (s - k); }, g2, qt).value;
  CHECK(std::abs(c_sub - c_plain) < 1e-12);
}

TEST_CASE("d1 is unimodular on Gamma with the right pole structure") {
  CHECK(std::abs(d1_of_k(P, {cplx(0, 0), Sheet::upper}) + kI) < 1e-16);
  for (int i = 0; i < 20; ++i) {
    const double t = uni(-0.95, 0.95);
    CHECK(std::abs(std::abs(d1_of_k(P, {cplx(0, t), Sheet::upper})) - 1.0) < 1e-14);
    const cplx k = random_off_axis();
    CHECK(std::abs(d1_of_k(P, {k, Sheet::upper}) * d1_of_k(P, {k, Sheet::lower}) - 1.0) < 1e-13);
  }
  // simple pole at inf^-: d1(k^-)/k -> 4 i omega in the local chart
  const double R = 1e7;
  CHECK(std::abs(d1_of_k(P, {cplx(R, 0), Sheet::lower}) / R - 4.0 * kI * P.omega) < 1e-6);
  // simple zero at inf^+
  CHECK(std::abs(d1_of_k(P, {cplx(R, 0), Sheet::upper})) < 1e-6);
}

TEST_CASE("spectral functions: asymptotics, conjugation, trace identity") {
  const auto far = FG_of_k(P, cplx(1e4, 0.0), qo);
  CHECK(std::abs(far.F - 1.0) < 1e-3);
  CHECK(std::abs(far.G) < 1e-3);
  double worst_tr = 0;
  for (int i = 0; i < 20; ++i) {
    const cplx k = random_off_axis();
    const auto s = FG_of_k(P, k, qo);
    const auto sc = FG_of_k(P, std::conj(k), qo);
    CHECK(std::abs(sc.F - std::conj(s.F)) < 1e-10);
    CHECK(std::abs(sc.G + std::conj(s.G)) < 1e-10);
    worst_tr = std::max(worst_tr,
                        std::abs(s.F * s.F - 1.0 + s.G * s.G - 4.0 * kI * k * P.omega * s.G * s.F));
    CHECK(std::abs(s.F) > 1e-6);
  }
  CHECK(worst_tr < 1e-10);
}

TEST_CASE("scalar and matrix jumps across Gamma") {
  double worst_scalar = 0, worst_matrix = 0;
  for (int i = 0; i < 10; ++i) {
    const double t = -0.9 + 1.8 * (i + 0.5) / 10.0;
    const cplx k0(0.0, t);
    const auto [Ep, Em] = E_boundary(P, k0, qo);
    const cplx d1 = d1_of_k(P, {k0, Sheet::upper, CutSide::right});
    worst_scalar = std::max(worst_scalar, std::abs(d1 * Em + Ep / d1));
    const cplx mu0 = mu_upper(P, k0);
    auto FG = [&](cplx E) {
      const cplx pref = kI / (4.0 * P.omega * mu0);
      return std::pair<cplx, cplx>(pref * (d1 / E - E / d1), pref * (1.0 / E - E));
    };
    const auto [Fp, Gp] = FG(Ep);
    const auto [Fm, Gm] = FG(Em);
    const cplx S[2][2] = {{0.0, 1.0}, {-1.0, 4.0 * kI * k0 * P.omega}};
    const cplx Mp[2][2] = {{-Gp, Fp}, {(1.0 - Gp * Gp) / Fp, Gp}};
    const cplx Mm[2][2] = {{-Gm, Fm}, {(1.0 - Gm * Gm) / Fm, Gm}};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        cplx lhs = 0, rhs = 0;
        for (int m = 0; m < 2; ++m) {
          lhs += S[r][m] * Mm[m][c];
          rhs += Mp[r][m] * S[m][c];
        }
        worst_matrix = std::max(worst_matrix, std::abs(lhs + rhs));
      }
  }
  CHECK(worst_scalar < 1e-8);
  CHECK(worst_matrix < 1e-8);
}

TEST_CASE("axis data") {
  SECTION("limits at the disk center") {
    const auto a0 = axis_data(P, 1e-9, qo);
    CHECK(std::abs(a0.d + kI) < 1e-8);
    const auto a1 = axis_data(P, 1e-6, qo);
    const auto a2 = axis_data(P, 2e-6, qo);
    CHECK(std::abs((a2.d - a1.d) / 1e-6 - 2.0 * kI * P.omega) < 1e-5);
    CHECK(std::abs((a2.Jprime - a1.Jprime) / 1e-6 + 2.0 * P.omega) < 1e-4);
  }
  SECTION("invariants and the K' identity") {
    for (double zeta : {0.5, 1.0, 2.0}) {
      const auto ad = axis_data(P, zeta, qo);
      CHECK(std::abs(ad.d.real()) < 1e-15);
      CHECK(ad.d.imag() < 0.0);
      CHECK(std::abs(ad.d + std::exp(-ad.Kprime)) < 1e-9);
    }
  }
}

TEST_CASE("axis values against frozen extended-precision references") {
  // frozen from an independent 40-digit quadrature of the same closed forms
  CHECK(std::abs(spdetail::jprime(P, 0.5, qo) - 0.2044612264098509463925503) < 1e-14);
  CHECK(std::abs(spdetail::jprime(P, 1.0, qo) - 0.1115840265152214350069287) < 1e-14);
  CHECK(std::abs(spdetail::jprime(P, 2.0, qo) - 0.05110273775183127726164942) < 1e-14);
  const cplx f_half(0.92580864159737862203, -0.18257471871578243525);
  const cplx f_one(0.94006107057264971481, -0.090134177963824432113);
  const cplx f_two(0.96100129048393411292, -0.031453011563256231651);
  CHECK(std::abs(axis_f(P, 0.5, qo) - f_half) < 1e-13);
  CHECK(std::abs(axis_f(P, 1.0, qo) - f_one) < 1e-13);
  CHECK(std::abs(axis_f(P, 2.0, qo) - f_two) < 1e-13);
  CHECK(std::abs(axis_e2U(P, 1.0, qo) - f_one.real()) < 1e-13);
}

TEST_CASE("axis Ernst potential") {
  SECTION("flat limit at large zeta") {
    CHECK(std::abs(axis_f(P, 50.0, qo) - 1.0) < 2e-2);
    CHECK(std::abs(axis_f(P, 500.0, qo) - 1.0) < 2e-3);
  }
  SECTION("Neumann anchor at the disk center") {
    auto f = [&](double zeta) { return axis_f(P, zeta, qo); };
    const cplx d1 = (-3.0 * f(0.0) + 4.0 * f(1e-3) - f(2e-3)) / 2e-3;
    const cplx d2 = (-3.0 * f(0.0) + 4.0 * f(5e-4) - f(1e-3)) / 1e-3;
    const cplx richardson = (4.0 * d2 - d1) / 3.0;
    CHECK(std::abs(richardson - cplx(0.0, 0.6)) < 1e-6);
  }
  SECTION("real part equals the closed-form e^{2U}") {
    for (double zeta : {0.4, 1.0, 2.7}) {
      CHECK(std::abs(axis_e2U(P, zeta, qo) - axis_f(P, zeta, qo).real()) < 1e-13);
    }
  }
  SECTION("equatorial symmetry across the axis") {
    for (double zeta : {0.5, 1.3}) {
      CHECK(std::abs(axis_f(P, -zeta, qo) - std::conj(axis_f(P, zeta, qo))) < 1e-10);
    }
  }
}
