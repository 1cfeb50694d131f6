#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ernstdisk/surface.hpp"
#include "ernstdisk/verify.hpp"

using namespace ernstdisk;

namespace {
const DiskParams P(1.0, 0.3);
std::mt19937_64 rng(777u);
double uni(double a, double b) { return a + (b - a) * (static_cast<double>(rng() >> 11) * 0x1.0p-53); }

cplx random_off_cut() {
  const double b = P.half_gap();
  while (true) {
    const cplx k(uni(-3, 3), uni(-3, 3));
    if (std::abs(k.real()) < 0.05 || std::abs(k.real() + 1.0) < 0.05) continue;
    if (std::abs(std::abs(k.imag()) - b) < 0.05) continue;
    return k;
  }
}
}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(DiskParams(1.0, 0.5), InvalidParams);   // 2 omega rho0 = 1
  CHECK_THROWS_AS(DiskParams(-1.0, 0.1), InvalidParams);
  const DiskParams ok(1.0, 0.3);
  CHECK(std::abs(ok.k1 - cplx(0.0, -5.0 / 3.0)) == 0.0);
  CHECK(ok.a0 == -5.0 / 3.0);
}

TEST_CASE("y squared reproduces the defining quartic") {
  const auto g = build_geometry(P, cplx(1, 1));
  for (int i = 0; i < 50; ++i) {
    const cplx k = random_off_cut();
    const cplx y = g.y_eval({k, Sheet::upper});
    const cplx quartic =
        (k - P.k1) * (k - std::conj(P.k1)) * (k + kI * g.z) * (k - kI * std::conj(g.z));
    CHECK(std::abs(y * y - quartic) < 1e-12 * (1.0 + std::abs(quartic)));
  }
}

TEST_CASE("sheet antisymmetry and large-k asymptotics") {
  const auto g = build_geometry(P, cplx(1, 1));
  for (int i = 0; i < 100; ++i) {
    const cplx k = random_off_cut();
    const cplx yp = g.y_eval({k, Sheet::upper});
    const cplx ym = g.y_eval({k, Sheet::lower});
    CHECK(std::abs(yp + ym) < 1e-13 * std::abs(yp));
    CHECK(std::abs(yp * ym + yp * yp) < 1e-12 * std::abs(yp * yp));
  }
  const double R = 1e6;
  CHECK(std::abs(g.y_upper(cplx(R, 0)) / (R * R) - 1.0) < 1e-5);
  const DegenerateSurface ds(P);
  CHECK(std::abs(mu_eval(ds, {cplx(R, 0), Sheet::upper}) / R - 1.0) < 1e-5);
}

TEST_CASE("continuation is the ground truth for the branch assignment") {
  const auto g = build_geometry(P, cplx(1, 1));
  // continue from far on the upper sheet to a handful of points, along routes
  // that provably cross no cut (the flip-rectangle interior is entered through
  // the segment [k1, conj k1], which is not a cut)
  const cplx base(8.0, 0.0);
  const cplx y_base = g.y_upper(base);
  CHECK(std::abs(y_base / (base * base) - 1.0) < 0.3);
  CHECK(y_base.real() > 0.0);
  struct Case {
    cplx target;
    std::vector<cplx> path;
  };
  const std::vector<Case> cases = {
      {cplx(2.2, 0.4), {base, cplx(3.2, 0.4), cplx(2.2, 0.4)}},
      {cplx(0.4, -1.2), {base, cplx(3.2, -3.0), cplx(0.4, -1.2)}},
      {cplx(-2.4, 1.1), {base, cplx(3.2, 3.2), cplx(-2.4, 3.2), cplx(-2.4, 1.1)}},
      {cplx(-0.4, 0.2), {base, cplx(3.0, -2.5), cplx(0.5, -2.5), cplx(0.5, 0.2), cplx(-0.4, 0.2)}}};
  for (const auto& c : cases) {
    const cplx yc = continue_y_along(g, c.path, y_base);
    const cplx yd = g.y_upper(c.target);
    INFO("target " << c.target.real() << "+" << c.target.imag() << "i");
    CHECK(std::abs(yc - yd) < 1e-8 * (1.0 + std::abs(yd)));
  }
}

TEST_CASE("monodromy flips the sheet around one branch point only") {
  const auto g = build_geometry(P, cplx(1, 1));
  const double b = P.half_gap();
  // around k1
  std::vector<cplx> loop;
  const cplx start = P.k1 + cplx(0.3, 0.0);
  for (int i = 0; i <= 60; ++i)
    loop.push_back(P.k1 + 0.3 * std::exp(2.0 * kPi * kI * (static_cast<double>(i) / 60.0)));
  const cplx y0 = g.y_upper(start);
  CHECK(std::abs(continue_y_along(g, loop, y0) + y0) < 1e-9 * std::abs(y0));
  // around -iz
  loop.clear();
  const cplx c2 = g.branch_lo;
  for (int i = 0; i <= 60; ++i)
    loop.push_back(c2 + 0.2 * std::exp(2.0 * kPi * kI * (static_cast<double>(i) / 60.0)));
  const cplx y1 = g.y_upper(c2 + 0.2);
  CHECK(std::abs(continue_y_along(g, loop, y1) + y1) < 1e-9 * std::abs(y1));
  // around both k1 and conj k1: back to the same sheet
  std::vector<cplx> loop2 = {cplx(0.3, -(b + 0.3)), cplx(0.3, b + 0.3), cplx(-1.4, b + 0.3),
                             cplx(-1.4, -(b + 0.3)), cplx(0.3, -(b + 0.3))};
  const cplx y2 = g.y_upper(loop2.front());
  CHECK(std::abs(continue_y_along(g, loop2, y2) - y2) < 1e-9 * std::abs(y2));
}

TEST_CASE("continuity across the cut line outside the cut") {
  const auto g = build_geometry(P, cplx(1, 1));
  for (double t : {g.rho + 0.2, g.rho + 1.1, -(g.rho + 0.5)}) {
    const cplx kl(g.zeta - 1e-10, t), kr(g.zeta + 1e-10, t);
    CHECK(std::abs(g.y_upper(kl) - g.y_upper(kr)) < 1e-9 * std::abs(g.y_upper(kr)));
  }
}

TEST_CASE("on-cut evaluation requires a side") {
  const auto g = build_geometry(P, cplx(1, 1));
  const cplx on_cut(g.zeta, 0.3 * g.rho);
  CHECK_THROWS_AS(g.y_upper(on_cut), OnCutWithoutSide);
  const cplx yl = g.y_upper(on_cut, CutSide::left);
  const cplx yr = g.y_upper(on_cut, CutSide::right);
  CHECK(std::abs(yl + yr) < 1e-13 * std::abs(yl));  // opposite limits across the cut
}

TEST_CASE("periods: normalization, positivity, independent rule") {
  QuadratureOptions qo;
  qo.abs_tol = 1e-12;
  const auto g = build_geometry(P, cplx(1, 1), qo);
  CHECK(g.B.imag() > 0.0);
  CHECK(std::abs(g.B - g.A * g.Z) < 1e-12);
  // a-period of omega equals 1: closed rectangle around the left cut
  const double b = P.half_gap();
  const cplx q0(0.3, -(b + 0.3));
  const std::vector<cplx> via = {cplx(0.3, b + 0.3), cplx(-1.4, b + 0.3), cplx(-1.4, -(b + 0.3))};
  const cplx loop = omega_integral(g, {q0, Sheet::upper}, {q0, Sheet::upper}, via, qo);
  CHECK(std::abs(loop - 1.0) < 1e-9);
  // independent fixed-rule quadrature reproduces B
  CHECK(std::abs(period_B_independent(g) - g.B) < 1e-9);
  // geometry is stable under a tolerance change (mesh refinement)
  QuadratureOptions qo2;
  qo2.abs_tol = 1e-9;
  const auto g2 = build_geometry(P, cplx(1, 1), qo2);
  CHECK(std::abs(g2.B - g.B) < 1e-9);
}

TEST_CASE("omega integrals") {
  QuadratureOptions qo;
  qo.abs_tol = 1e-12;
  const auto g = build_geometry(P, cplx(1, 1), qo);
  SECTION("empty path") {
    const cplx v = omega_integral(g, {cplx(2.5, 0.5), Sheet::upper}, {cplx(2.5, 0.5), Sheet::upper});
    CHECK(std::abs(v) == 0.0);
  }
  SECTION("doubled cut path closes to an a-period") {
    // down the east side of the right cut on the upper sheet and back on the
    // lower sheet: a closed cycle around the right cut, so the value is -+1
    const cplx red = lattice_reduce(2.0 * g.chi, g.B);
    CHECK(std::abs(red) < 1e-9);
  }
  SECTION("antisymmetry of the two infinities") {
    const cplx from(2.4, -0.7);
    const cplx plus = omega_integral_to_infinity(g, {from, Sheet::upper}, Sheet::upper, qo);
    const cplx minus = omega_integral_to_infinity(g, {from, Sheet::lower}, Sheet::lower, qo);
    CHECK(std::abs(plus + minus) < 1e-10);
    // phi(inf+) = -phi(inf-) exactly in the polygon class used by the engine
    const cplx phi_plus = -g.phi_inf_minus;
    const cplx direct = omega_integral(g, {g.branch_lo, Sheet::upper}, {from, Sheet::upper},
                                       {cplx(g.zeta + 1.2, -g.rho - 0.6), cplx(2.4, -2.0)}, qo) +
                        plus;
    CHECK(std::abs(lattice_reduce(direct - phi_plus, g.B)) < 1e-9);
  }
  SECTION("paths through branch points are rejected") {
    CHECK_THROWS_AS(omega_integral(g, {cplx(2, -1), Sheet::upper}, {cplx(0, -1), Sheet::upper},
                                   {g.branch_lo}),
                    PathThroughBranchPoint);
  }
}

TEST_CASE("third-kind differentials") {
  QuadratureOptions qo;
  qo.abs_tol = 1e-12;
  const auto g = build_geometry(P, cplx(1, 1), qo);
  const double b = P.half_gap();
  SECTION("vanishing a-period of omega_{inf+ inf-}") {
    const auto aseg = sdetail::axis_y_legs(g, -b, b);
    const cplx aper = 2.0 * sdetail::integrate_inv_y(
                                g, aseg, [&](cplx k) { return -k + g.cI * g.A; }, CutSide::left, +1.0, qo)
                                .value;
    CHECK(std::abs(aper) < 1e-10);
  }
  SECTION("residue +1 at zeta^+") {
    const double zp = 2.0;
    std::vector<cplx> sq = {cplx(zp + 0.15, 0.0), cplx(zp + 0.15, 0.15), cplx(zp - 0.15, 0.15),
                            cplx(zp - 0.15, -0.15), cplx(zp + 0.15, -0.15), cplx(zp + 0.15, 0.0)};
    cplx loop = 0;
    for (std::size_t i = 0; i + 1 < sq.size(); ++i) {
      Contour c{sq[i], sq[i + 1]};
      loop += integrate([&](cplx k) { return omega3_pair(g, zp, {k, Sheet::upper}, qo); }, c, qo).value;
    }
    CHECK(std::abs(loop - 2.0 * kPi * kI) < 1e-7);
  }
  SECTION("pole evaluation is rejected") {
    CHECK_THROWS_AS(omega3_pair(g, 2.0, {cplx(2.0, 0.0), Sheet::upper}), std::invalid_argument);
  }
}

TEST_CASE("degenerate surface closed forms") {
  const DegenerateSurface d(P);
  CHECK(std::abs(mu_eval(d, {cplx(0, 0), Sheet::upper}) - 5.0 / 3.0) < 1e-15);
  const double zeta = 0.8;
  CHECK(std::abs(mu_eval(d, {cplx(zeta, 0), Sheet::upper}) - std::hypot(zeta, 5.0 / 3.0)) < 1e-14);
  // omega'_{inf+ inf-} = -dk/mu
  const cplx k(1.2, 0.7);
  CHECK(std::abs(omega3_prime_infinity(d, {k, Sheet::upper}) + 1.0 / mu_upper(P, k)) == 0.0);
  // antiderivative of 1/mu is log(k + mu)
  QuadratureOptions qo;
  qo.abs_tol = 1e-12;
  const cplx K(1.3, 0.9);
  sdetail::YLeg leg{P.k1, K, sdetail::BranchId::k1, sdetail::BranchId::none, true, false};
  const cplx integral = sdetail::integrate_offset_legs(
                            {leg},
                            [&](cplx k2, sdetail::BranchId bp, cplx delta) {
                              if (bp == sdetail::BranchId::none) return 1.0 / mu_upper(P, k2);
                              return 1.0 / mu_upper_offset(P, delta, bp == sdetail::BranchId::k1bar);
                            },
                            qo)
                            .value;
  CHECK(std::abs(std::exp(integral) - (K + mu_upper(P, K)) / P.k1) < 1e-10);
}

TEST_CASE("axis threshold refuses near-axis geometry") {
  CHECK_THROWS_AS(build_geometry(P, cplx(1e-5, 1.0)), DegenerateSurfaceError);
}

TEST_CASE("mu on the polyline cut needs a side and flips across it") {
  const cplx on_leg(-1.0, 0.4);  // on the vertical leg of the left cut
  CHECK_THROWS_AS(mu_upper(P, on_leg), OnCutWithoutSide);
  const cplx l = mu_upper(P, on_leg, CutSide::left);
  const cplx r = mu_upper(P, on_leg, CutSide::right);
  CHECK(std::abs(l + r) < 1e-13 * std::abs(l));
}
