// Acceptance gate for the rotating-disk solver at the reference configuration
// rho0 = 1, omega = 3/10.  Each criterion prints one line; the exit status is
// the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "ernstdisk/ernstdisk.hpp"

using namespace ernstdisk;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const std::string& what, double measured, double tol, bool passed,
            double seconds) {
  if (!passed) ++failures;
  std::printf("[%2d] %s  %-46s measured %.3e  tol %.3e  (%.1fs)\n", id, passed ? "PASS" : "FAIL",
              what.c_str(), measured, tol, seconds);
  std::fflush(stdout);
}

template <class Fn>
void criterion(int id, const std::string& what, double tol, Fn&& measure) {
  const auto t0 = clock_type::now();
  double measured = 0;
  bool ok = true;
  try {
    measured = measure();
    ok = std::isfinite(measured) && measured <= tol;
  } catch (const std::exception& e) {
    std::printf("[%2d] FAIL %s: exception: %s\n", id, what.c_str(), e.what());
    ++failures;
    return;
  }
  const double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  report(id, what, measured, tol, ok, secs);
}

}  // namespace

int main() {
  const DiskParams P(1.0, 0.3);
  SolutionContext ctx(P);
  const QuadratureOptions qo = ctx.quad();

  // 1. branch point anchor
  criterion(1, "k1 == -5i/3 (machine precision)", 1e-15,
            [&] { return std::abs(P.k1 - cplx(0.0, -5.0 / 3.0)); });

  // 2. axis Neumann anchor d f(i zeta)/d zeta |_{+0} = 0.6 i
  criterion(2, "axis Neumann anchor 0.6i", 1e-6, [&] {
    auto f = [&](double zeta) { return axis_f(P, zeta, qo); };
    const cplx d1 = (-3.0 * f(0.0) + 4.0 * f(1e-3) - f(2e-3)) / 2e-3;
    const cplx d2 = (-3.0 * f(0.0) + 4.0 * f(5e-4) - f(1e-3)) / 1e-3;
    return std::abs((4.0 * d2 - d1) / 3.0 - cplx(0.0, 0.6));
  });

  // 3. Neumann condition on the disk
  criterion(3, "disk Neumann |d/dz Re f_Omega| at rho={.2,.5,.8}", 1e-5, [&] {
    double worst = 0;
    for (double rho : {0.2, 0.5, 0.8}) worst = std::max(worst, neumann_residual(ctx, rho));
    return worst;
  });

  // 4. Ernst equation residual
  criterion(4, "Ernst PDE residual at 10 interior points", 1e-5, [&] {
    const double pts[10][2] = {{0.3, 0.4}, {0.5, 1.0}, {1.5, 0.5}, {2.0, 1.0}, {1.0, 2.0},
                               {0.4, 1.5}, {2.5, 2.0}, {1.2, 0.3}, {0.8, 0.8}, {1.7, 1.3}};
    double worst = 0;
    for (const auto& p : pts) worst = std::max(worst, pde_residual(ctx, p[0], p[1]));
    return worst;
  });

  // 5. cross-formula identity on a 5x5 grid
  criterion(5, "|Re f - e2U| on [0.2,2]^2 grid", 1e-8, [&] {
    double worst = 0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        const cplx z(0.2 + 0.45 * i, 0.2 + 0.45 * j);
        const auto d = ctx.zdata(z);
        worst = std::max(worst, std::abs(ernst_f(d->geom, d->ui).real() - metric_e2U(d->geom, d->ui)));
      }
    return worst;
  });

  // 6. metric relations
  criterion(6, "a_z and kappa_z relations at 5 points", 1e-5, [&] {
    const double pts[5][2] = {{0.5, 0.6}, {1.2, 0.8}, {0.8, 1.4}, {1.6, 0.4}, {2.0, 1.2}};
    double worst = 0;
    for (const auto& p : pts) {
      worst = std::max(worst, a_relation_residual(ctx, p[0], p[1]));
      worst = std::max(worst, kappa_relation_residual(ctx, p[0], p[1]));
    }
    return worst;
  });

  // 7. axis limits are O(rho^2)
  criterion(7, "axis ratios for a and e2kappa in [50,200]", std::log10(2.0), [&] {
    const auto d2 = ctx.zdata(cplx(1e-2, 1.0));
    const auto d3 = ctx.zdata(cplx(1e-3, 1.0));
    const double ra = std::abs(metric_a(d2->geom, d2->ui)) / std::abs(metric_a(d3->geom, d3->ui));
    const double k2 = metric_e2kappa(ctx, cplx(1e-2, 1.0)) - 1.0;
    const double k3 = metric_e2kappa(ctx, cplx(1e-3, 1.0)) - 1.0;
    const double rk = std::abs(k2 / k3);
    return std::max(std::abs(std::log10(ra / 100.0)), std::abs(std::log10(rk / 100.0)));
  });

  // 8. theta branch vs axis branch
  criterion(8, "|f(rho+i) - f(i)| ratio in [50,200]", std::log10(2.0), [&] {
    const cplx fax = axis_f(P, 1.0, qo);
    const double d2 = std::abs(ernst_f(ctx, cplx(1e-2, 1.0)) - fax);
    const double d3 = std::abs(ernst_f(ctx, cplx(1e-3, 1.0)) - fax);
    return std::abs(std::log10(d2 / d3 / 100.0));
  });

  // 9. spectral identities
  criterion(9, "tr(MS), jump, E+E-, |d1| identities", 1.0, [&] {
    std::mt19937_64 rng(20240801u);
    auto uni = [&rng](double a, double b) {
      return a + (b - a) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    double tr_worst = 0, jump_worst = 0, prod_worst = 0, mod_worst = 0;
    for (int i = 0; i < 20; ++i) {
      cplx k;
      do {
        k = cplx(uni(-2.5, 2.5), uni(-2.5, 2.5));
      } while (std::abs(k.real()) < 0.1 || std::abs(std::abs(k.imag()) - P.half_gap()) < 0.1 ||
               std::abs(k.real() + 1.0) < 0.05);
      const auto s = FG_of_k(P, k, qo);
      tr_worst = std::max(tr_worst,
                          std::abs(s.F * s.F - 1.0 + s.G * s.G - 4.0 * kI * k * P.omega * s.G * s.F));
      const cplx ep = E_of_k(P, {k, Sheet::upper}, qo);
      const cplx em = E_of_k(P, {k, Sheet::lower}, qo);
      prod_worst = std::max(prod_worst, std::abs(ep * em - 1.0));
    }
    for (int i = 0; i < 10; ++i) {
      const cplx k0(0.0, -0.9 + 1.8 * (i + 0.5) / 10.0);
      const auto [Ep, Em] = E_boundary(P, k0, qo);
      const cplx d1 = d1_of_k(P, {k0, Sheet::upper, CutSide::right});
      jump_worst = std::max(jump_worst, std::abs(d1 * Em + Ep / d1));
      mod_worst = std::max(mod_worst, std::abs(std::abs(d1) - 1.0));
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
          jump_worst = std::max(jump_worst, std::abs(lhs + rhs));
        }
    }
    // aggregate as fractions of the individual tolerances
    return std::max(std::max(tr_worst / 1e-10, jump_worst / 1e-8),
                    std::max(prod_worst / 1e-10, mod_worst / 1e-12));
  });

  // 10. closed-form anchor -e^{-K'} = d
  criterion(10, "|d + e^{-K'}| at zeta={.5,1,2}", 1e-9, [&] {
    double worst = 0;
    for (double zeta : {0.5, 1.0, 2.0}) {
      const auto ad = axis_data(P, zeta, qo);
      worst = std::max(worst, std::abs(ad.d + std::exp(-ad.Kprime)));
    }
    return worst;
  });

  // 11. theta oracle
  criterion(11, "theta vs brute force, parity, quasi-periodicity", 1e-14, [&] {
    std::mt19937_64 rng(77u);
    auto uni = [&rng](double a, double b) {
      return a + (b - a) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const cplx B(uni(-0.8, 0.8), uni(0.35, 2.0));
      const ThetaParams tp{B};
      const cplx v(uni(-2, 2), uni(-0.45, 0.45) * B.imag());
      const cplx t = theta(v, tp);
      worst = std::max(worst, std::abs(t - brute_force_theta(v, B, 200)));
      worst = std::max(worst, std::abs(t - theta(-v, tp)));
      worst = std::max(worst, std::abs(theta(v + 1.0, tp) - t));
      const cplx cocycle = std::exp(-2.0 * kPi * kI * (v + 0.5 * B));
      worst = std::max(worst, std::abs(theta(v + B, tp) - cocycle * t) / (1.0 + std::abs(cocycle * t)));
    }
    return worst;
  });

  // 12. regularized-integral conventions
  criterion(12, "L^reg/K0 side-independence and axis consistency", 1.0, [&] {
    const auto d = ctx.zdata(cplx(1, 1));
    const auto& g = d->geom;
    const cplx kap1(0.0, 0.41);
    const auto d0 = g.y_west_derivs(kap1);
    Contour aseg{P.k1, std::conj(P.k1)};
    aseg.tag(0, EndpointSingularity::inverse_sqrt).tag(1, EndpointSingularity::inverse_sqrt);
    auto kernel = [&](cplx k) {
      return (d0[1] * (k - kap1) + d0[0]) / ((k - kap1) * (k - kap1) * g.y_west(k));
    };
    QuadratureOptions qd = qo;
    qd.abs_tol = 1e-10;  // the detour kernel has |f| ~ 1/eps^2: roundoff floor ~ 1e-11
    const cplx left = integrate(kernel, deform_through_pole(aseg, kap1, 1e-3, DeformSide::left), qd).value;
    const cplx right = integrate(kernel, deform_through_pole(aseg, kap1, 1e-3, DeformSide::right), qd).value;
    const double side = std::abs(left - right);
    const double v1 = metric_e2kappa(ctx, cplx(1e-3, 1.0));
    const double v2 = metric_e2kappa(ctx, cplx(2e-3, 1.0));
    const double axis = std::abs((4.0 * v1 - v2) / 3.0 - 1.0);
    return std::max(side / 1e-9, axis / 1e-6);
  });

  // 13. Jacobi inversion oracle
  criterion(13, "m1 inversion certifies f at 3 points", 1.0, [&] {
    double worst = 0;
    for (const cplx z : {cplx(1.0, 1.0), cplx(0.7, 0.5), cplx(1.4, 1.6)}) {
      const auto w = recover_m1(ctx, z);
      worst = std::max(worst, std::max(w.abel_residual / 1e-7, w.logf_residual / 1e-6));
    }
    return worst;
  });

  // 14. determinism of the full suite output
  criterion(14, "full suite reruns byte-identically", 0.0, [&] {
    SolutionContext c1(P), c2(P);
    const auto r1 = run_suite(c1, SuiteLevel::full);
    const auto r2 = run_suite(c2, SuiteLevel::full);
    if (!r1.all_passed()) {
      for (const auto& c : r1.checks)
        if (!c.passed)
          std::printf("     (suite check failed: %s measured %.3e tol %.3e)\n", c.name.c_str(), c.measured,
                      c.tolerance);
      return 1.0;
    }
    return r1.to_json() == r2.to_json() ? 0.0 : 1.0;
  });

  std::printf(failures == 0 ? "acceptance: all criteria passed\n"
                            : "acceptance: %d criterion(s) FAILED\n",
              failures);
  return failures;
}
