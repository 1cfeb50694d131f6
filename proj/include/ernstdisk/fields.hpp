#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "ernstdisk/errors.hpp"
#include "ernstdisk/quadrature.hpp"
#include "ernstdisk/spectral.hpp"
#include "ernstdisk/surface.hpp"
#include "ernstdisk/theta.hpp"

namespace ernstdisk {

// ---------------------------------------------------------------------------
// u and I
// ---------------------------------------------------------------------------

struct UIData {
  cplx u;      // int_{Gamma^+} h omega, purely imaginary
  double I;    // int_{Gamma^+} h omega_{inf+ inf-}, real
  double err;  // accumulated quadrature error estimate
  double reality_defect;  // max(|Re u|, |Im I_raw|), diagnostic
};

inline UIData u_and_I(const SurfaceGeometry& g, const QuadratureOptions& opt = {}) {
  const auto gamma = gamma_y_legs(g);
  const auto& P = g.params;
  const auto i1 =
      sdetail::integrate_inv_y(g, gamma, [&P](cplx k) { return h_of_k(P, k); }, CutSide::left, +1.0, opt);
  const auto ik =
      sdetail::integrate_inv_y(g, gamma, [&P](cplx k) { return h_of_k(P, k) * k; }, CutSide::left, +1.0, opt);
  UIData d;
  d.u = g.A * i1.value;
  const cplx i_raw = -ik.value + g.cI * g.A * i1.value;
  d.I = i_raw.real();
  d.err = std::abs(g.A) * (i1.error_estimate + ik.error_estimate) + g.quad_err;
  d.reality_defect = std::max(std::abs(d.u.real()), std::abs(i_raw.imag()));
  return d;
}

// ---------------------------------------------------------------------------
// Theta combinations
// ---------------------------------------------------------------------------

// Q(v) = Theta(v+phi) Theta(v+psi) / (Theta(v) Theta(v+chi)) with
// phi = int_{-iz}^{inf-} omega, psi = int_{i conj z}^{inf-} omega,
// chi = int_{-iz}^{i conj z} omega.
inline cplx Q_of_v(cplx v, const SurfaceGeometry& g) {
  const ThetaParams tp{g.B};
  const ReducedTheta n1 = theta_reduced(v + g.phi_inf_minus, tp);
  const ReducedTheta n2 = theta_reduced(v + g.psi_inf_minus, tp);
  const ReducedTheta d1 = theta_reduced(v, tp);
  const ReducedTheta d2 = theta_reduced(v + g.chi, tp);
  if (std::abs(d1.value) < 1e-10 || std::abs(d2.value) < 1e-10)
    throw ThetaZeroDenominator("Q(v): theta denominator vanishes");
  return std::exp(n1.log_factor + n2.log_factor - d1.log_factor - d2.log_factor) *
         (n1.value * n2.value) / (d1.value * d2.value);
}

// ---------------------------------------------------------------------------
// Solution context: parameter set, caches, the constant K0
// ---------------------------------------------------------------------------

double K0_constant(const DiskParams& P, const QuadratureOptions& opt);  // fwd

class SolutionContext {
 public:
  struct ZData {
    SurfaceGeometry geom;
    UIData ui;
  };

  explicit SolutionContext(const DiskParams& params, QuadratureOptions opt = tight_defaults(),
                           double rho_axis_factor = 1e-3)
      : params_(params), opt_(opt), rho_axis_(rho_axis_factor * params.rho0) {}

  static QuadratureOptions tight_defaults() {
    QuadratureOptions o;
    o.abs_tol = 1e-12;
    return o;
  }

  const DiskParams& params() const { return params_; }
  const QuadratureOptions& quad() const { return opt_; }
  double rho_axis() const { return rho_axis_; }

  double K0() const {
    std::call_once(k0_once_, [this] { k0_ = K0_constant(params_, opt_); });
    return k0_;
  }

  std::shared_ptr<const ZData> zdata(cplx z) const {
    const auto key = std::make_pair(z.real(), z.imag());
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    auto d = std::make_shared<ZData>(ZData{build_geometry(params_, z, opt_, rho_axis_), {}});
    d->ui = u_and_I(d->geom, opt_);
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = cache_.emplace(key, std::move(d));
    (void)inserted;
    if (cache_.size() > 4096) {  // FD stencils revisit points; grids do not
      auto victim = cache_.begin();
      if (victim->first != key) cache_.erase(victim);
    }
    return it->second;
  }

  double lreg(cplx z) const;  // memoized, defined after L_reg

 private:
  DiskParams params_;
  QuadratureOptions opt_;
  double rho_axis_;
  mutable std::once_flag k0_once_;
  mutable double k0_ = 0.0;
  mutable std::mutex mu_;
  mutable std::map<std::pair<double, double>, std::shared_ptr<const ZData>> cache_;
  mutable std::map<std::pair<double, double>, double> lreg_cache_;
};

// ---------------------------------------------------------------------------
// Ernst potential and metric functions (zeta >= 0 branch)
// ---------------------------------------------------------------------------

inline cplx ernst_f(const SurfaceGeometry& g, const UIData& ui) {
  const ThetaParams tp{g.B};
  const ReducedTheta num = theta_reduced(ui.u - g.phi_inf_minus, tp);
  const ReducedTheta den = theta_reduced(ui.u + g.phi_inf_minus, tp);
  if (std::abs(den.value) < 1e-10) throw ThetaZeroDenominator("Ernst potential: theta denominator vanishes");
  const cplx f = std::exp(num.log_factor - den.log_factor + ui.I) * (num.value / den.value);
  if (!(f.real() > 0.0)) throw ErgosphereDetected("Re f <= 0: ergosphere reached");
  return f;
}

inline cplx ernst_f(const SolutionContext& ctx, cplx z) {
  const auto d = ctx.zdata(z);
  return ernst_f(d->geom, d->ui);
}

inline double metric_e2U(const SurfaceGeometry& g, const UIData& ui) {
  const cplx v = Q_of_v(0.0, g) / Q_of_v(ui.u, g) * std::exp(ui.I);
  if (!(v.real() > 0.0)) throw ErgosphereDetected("e^{2U} <= 0");
  return v.real();
}

inline double metric_e2U(const SolutionContext& ctx, cplx z) {
  const auto d = ctx.zdata(z);
  return metric_e2U(d->geom, d->ui);
}

inline double metric_a(const SurfaceGeometry& g, const UIData& ui) {
  const ThetaParams tp{g.B};
  const cplx q0 = Q_of_v(0.0, g);
  const cplx qu = Q_of_v(ui.u, g);
  const ReducedTheta tn = theta_reduced(ui.u + g.phi_inf_minus + g.psi_inf_minus, tp);
  const ReducedTheta td = theta_reduced(ui.u + g.chi, tp);
  if (std::abs(td.value) < 1e-10) throw ThetaZeroDenominator("a(z): theta denominator vanishes");
  const cplx big = std::exp(tn.log_factor - td.log_factor) * (tn.value / td.value) / q0;
  const cplx a = g.params.a0 - (g.rho / q0) * (big - qu) * std::exp(-ui.I);
  return a.real();
}

inline double metric_a(const SolutionContext& ctx, cplx z) {
  const auto d = ctx.zdata(z);
  return metric_a(d->geom, d->ui);
}

// ---------------------------------------------------------------------------
// The regularized double integral L^reg and the constant K0
// ---------------------------------------------------------------------------

namespace fdetail {

// Fixed composite Kronrod grid over offset-aware legs, with y, y', y'' and
// h(k) cached per node.  Used for the regularized double integrals, whose
// kernels are then a few flops per node pair.
struct AxisNode {
  cplx k;
  cplx w;
  std::array<cplx, 3> yd;
  cplx hk;
};

inline std::vector<AxisNode> build_axis_grid(const SurfaceGeometry& g,
                                             const std::vector<sdetail::YLeg>& legs, int depth) {
  using sdetail::BranchId;
  std::vector<AxisNode> nodes;
  const int nsub = 1 << depth;
  struct Half {
    cplx from, d;
    BranchId bp;
    bool graded;
    double orient;
  };
  std::vector<Half> halves;
  for (const auto& leg : legs) {
    const cplx m = 0.5 * (leg.a + leg.b);
    const bool ga = leg.grade_a || leg.bp_a != BranchId::none;
    const bool gb = leg.grade_b || leg.bp_b != BranchId::none;
    halves.push_back({leg.a, m - leg.a, leg.bp_a, ga, +1.0});
    halves.push_back({leg.b, m - leg.b, leg.bp_b, gb, -1.0});
  }
  for (const auto& H : halves) {
    for (int s = 0; s < nsub; ++s) {
      const double a = static_cast<double>(s) / nsub, b = static_cast<double>(s + 1) / nsub;
      const double hw = 0.5 * (b - a), c = 0.5 * (a + b);
      for (int j = 0; j < 15; ++j) {
        const double x = (j < 7) ? (c - hw * qdetail::kXgk[j]) : (j == 7 ? c : c + hw * qdetail::kXgk[14 - j]);
        const double wj = qdetail::kWgk[j < 8 ? j : 14 - j] * hw;
        AxisNode n;
        if (H.graded) {
          const cplx delta = H.d * (x * x);
          n.k = H.from + delta;
          n.w = wj * (H.orient * 2.0 * x) * H.d;
          n.yd = (H.bp == BranchId::none) ? g.y_west_derivs(n.k) : y_west_derivs_offset(g, H.bp, delta);
        } else {
          n.k = H.from + H.d * x;
          n.w = wj * H.orient * H.d;
          n.yd = g.y_west_derivs(n.k);
        }
        n.hk = h_of_k(g.params, n.k);
        nodes.push_back(n);
      }
    }
  }
  return nodes;
}

// D(k1,k2) from cached node data; exact second-derivative limit on the diagonal.
inline cplx pair_divided_diff(const AxisNode& n1, const AxisNode& n2) {
  const cplx h = n2.k - n1.k;
  if (std::abs(h) < 1e-9) return 0.5 * n1.yd[2];
  return (n2.yd[0] - n1.yd[0] - n1.yd[1] * h) / (h * h);
}

inline double lreg_at_depth(const SurfaceGeometry& g, const UIData& ui, int depth) {
  const auto& P = g.params;
  const double b = P.half_gap();
  const auto gnodes = build_axis_grid(g, gamma_y_legs(g), depth);
  const auto anodes = build_axis_grid(g, sdetail::axis_y_legs(g, -b, b), depth);

  // T1 = sum_i sum_j w_i w_j h_i h_j (-D(k_i, k_j)) / y_j over Gamma x Gamma
  cplx t1 = 0;
  for (const auto& n1 : gnodes) {
    cplx inner = 0;
    for (const auto& n2 : gnodes) inner += n2.w * n2.hk * (-pair_divided_diff(n1, n2)) / n2.yd[0];
    t1 += n1.w * n1.hk * inner;
  }

  // T2: a-cycle finite part against h(k1)
  cplx t2 = 0;
  for (const auto& n1 : gnodes) {
    cplx smooth = 0;
    for (const auto& n2 : anodes) smooth += n2.w * (-pair_divided_diff(n1, n2)) / n2.yd[0];
    const cplx exact = -1.0 / (std::conj(P.k1) - n1.k) + 1.0 / (P.k1 - n1.k);
    t2 += n1.w * n1.hk * 2.0 * (smooth + exact);
  }
  return (0.5 * (t1 - t2 * ui.u)).real();
}

}  // namespace fdetail

// The regularized double integral: first kernel
// (y'(k1+)(k2-k1) + y(k1+) - y(k2+)) / ((k2-k1)^2 y(k2+)) over Gamma x Gamma
// (removable diagonal), minus the a-cycle finite-part correction times
// int_Gamma h omega = u.  Fixed composite grids with dyadic refinement; the
// returned value is converged to ~|change under depth doubling|.
inline double L_reg(const SurfaceGeometry& g, const UIData& ui, QuadratureOptions opt = {},
                    double* err_out = nullptr) {
  double prev = fdetail::lreg_at_depth(g, ui, 2);
  for (int depth = 3; depth <= 6; ++depth) {
    const double cur = fdetail::lreg_at_depth(g, ui, depth);
    const double diff = std::abs(cur - prev);
    if (diff < std::max(opt.abs_tol, 1e-13) || depth == 6) {
      if (err_out) *err_out = diff;
      return cur;
    }
    prev = cur;
  }
  return prev;  // unreachable
}

inline double SolutionContext::lreg(cplx z) const {
  const auto key = std::make_pair(z.real(), z.imag());
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = lreg_cache_.find(key);
    if (it != lreg_cache_.end()) return it->second;
  }
  const auto d = zdata(z);
  QuadratureOptions o = opt_;
  o.abs_tol = std::max(opt_.abs_tol, 1e-11);
  const double v = L_reg(d->geom, d->ui, o);
  std::lock_guard<std::mutex> lock(mu_);
  if (lreg_cache_.size() > 4096) lreg_cache_.clear();
  lreg_cache_.emplace(key, v);
  return v;
}

// K0 = exp(-1/2 int int h(k1) h(k2) [ -Dmu(k1,k2)/mu(k2+) ] dk2 dk1) on the
// degenerate surface; z-independent and positive.
inline double K0_constant(const DiskParams& P, const QuadratureOptions& opt = {}) {
  const double b = P.half_gap();
  Contour gamma{cplx(0.0, -P.rho0), cplx(0.0, 0.0), cplx(0.0, P.rho0)};
  QuadratureOptions inner = opt;
  inner.abs_tol = std::max(opt.abs_tol * 1e-2, 1e-13);

  auto mu_derivs = [&P, b](cplx k) -> std::array<cplx, 3> {
    const cplx mu = mu_upper(P, k);
    return {mu, k / mu, (b * b) / (mu * mu * mu)};
  };
  auto divided_diff2 = [&](cplx k0, cplx k) -> cplx {
    const cplx h = k - k0;
    const double scale = 1.0 + std::abs(k0) + std::abs(k);
    if (std::abs(h) > 0.02 * scale) {
      const auto d0 = mu_derivs(k0);
      return (mu_upper(P, k) - d0[0] - d0[1] * h) / (h * h);
    }
    static constexpr double gl_x[5] = {0.04691007703066800, 0.23076534494715845, 0.5,
                                       0.76923465505284155, 0.95308992296933200};
    static constexpr double gl_w[5] = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                                       0.23931433524968324, 0.11846344252809454};
    cplx acc = 0;
    for (int i = 0; i < 5; ++i) acc += gl_w[i] * (1.0 - gl_x[i]) * mu_derivs(k0 + gl_x[i] * h)[2];
    return acc;
  };

  const auto t = integrate(
      [&](cplx kap1) {
        const cplx inner_val =
            integrate([&](cplx kap2) { return h_of_k(P, kap2) * (-divided_diff2(kap1, kap2)) / mu_upper(P, kap2); },
                      gamma, inner)
                .value;
        return h_of_k(P, kap1) * inner_val;
      },
      gamma, opt);
  const double K0 = std::exp(-0.5 * t.value.real());
  if (!(K0 > 0.0)) throw NumericalError("K0 must be positive");
  return K0;
}

inline double metric_e2kappa(const SurfaceGeometry& g, const UIData& ui, double K0, double lreg_value) {
  const ThetaParams tp{g.B};
  const ReducedTheta n1 = theta_reduced(ui.u, tp);
  const ReducedTheta n2 = theta_reduced(ui.u + g.chi, tp);
  const ReducedTheta d1 = theta_reduced(0.0, tp);
  const ReducedTheta d2 = theta_reduced(g.chi, tp);
  const cplx ratio = std::exp(n1.log_factor + n2.log_factor - d1.log_factor - d2.log_factor) *
                     (n1.value * n2.value) / (d1.value * d2.value);
  const double v = K0 * ratio.real() * std::exp(lreg_value);
  if (!(v > 0.0)) throw NumericalError("e^{2 kappa} must be positive");
  return v;
}

inline double metric_e2kappa(const SolutionContext& ctx, cplx z) {
  const auto d = ctx.zdata(z);
  return metric_e2kappa(d->geom, d->ui, ctx.K0(), ctx.lreg(z));
}

// ---------------------------------------------------------------------------
// Co-rotating frame
// ---------------------------------------------------------------------------

struct Corotating {
  double e2U_Omega = 0.0;
  double a_Omega = 0.0;
  cplx f_Omega{};      // imaginary part only when b was requested
  bool valid = true;   // false: co-rotating norm non-positive (ergoregion)
  bool has_b = false;
};

inline Corotating corotating_from(double e2U, double a, double rho, double omega) {
  Corotating c;
  const double n = e2U * (1.0 + omega * a) * (1.0 + omega * a) - omega * omega * rho * rho / e2U;
  c.e2U_Omega = n;
  if (!(n > 0.0)) {
    c.valid = false;
    c.a_Omega = std::numeric_limits<double>::quiet_NaN();
    c.f_Omega = cplx(n, std::numeric_limits<double>::quiet_NaN());
    return c;
  }
  c.a_Omega = (1.0 - (1.0 + omega * a) * e2U / n) / omega;
  c.f_Omega = cplx(n, 0.0);
  return c;
}

namespace fdetail {

inline Corotating corotating_at(const SolutionContext& ctx, double rho, double zeta) {
  const auto d = ctx.zdata(cplx(rho, std::abs(zeta)));
  const double e2U = metric_e2U(d->geom, d->ui);
  const double a = metric_a(d->geom, d->ui);
  return corotating_from(e2U, a, rho, ctx.params().omega);
}

}  // namespace fdetail

// Im f_Omega = b_Omega, integrated downward from large zeta using
// d b_Omega / d zeta = e^{4 U_Omega} (da_Omega/drho) / rho with the radial
// derivative taken by central differences.  The co-rotating frame is not
// asymptotically flat: d b_Omega / d zeta -> -2 omega far away (already so in
// flat space), so the convergent anchoring is b_Omega + 2 omega zeta -> 0.
// Optional output with correspondingly loose tolerances.
inline double corotating_b(const SolutionContext& ctx, double rho, double zeta, double* err_out = nullptr) {
  const double omega = ctx.params().omega;
  if (!(rho > 0.0)) return -2.0 * omega * zeta;  // axis value: a = O(rho^2)
  const double h = 1e-4 * std::max(1.0, rho);
  auto db_dzeta_excess = [&](double zt) {
    const Corotating cp = fdetail::corotating_at(ctx, rho + h, zt);
    const Corotating cm = fdetail::corotating_at(ctx, rho - h, zt);
    const Corotating c0 = fdetail::corotating_at(ctx, rho, zt);
    if (!cp.valid || !cm.valid || !c0.valid) throw ErgosphereDetected("co-rotating norm non-positive");
    const double da_drho = (cp.a_Omega - cm.a_Omega) / (2.0 * h);
    return c0.e2U_Omega * c0.e2U_Omega * da_drho / rho + 2.0 * omega;
  };
  const double za = std::abs(zeta);
  const double z_far = std::max(30.0, za + 10.0);
  QuadratureOptions opt;
  opt.abs_tol = 1e-7;
  Contour path{cplx(za, 0.0), cplx(z_far, 0.0)};
  const auto r = integrate([&](cplx t) { return cplx(db_dzeta_excess(t.real())); }, path, opt);
  const double tail = std::abs(db_dzeta_excess(z_far)) * z_far;
  if (err_out) *err_out = r.error_estimate + tail + 1e-6;
  const double b_upper = -2.0 * omega * za - r.value.real();
  return zeta >= 0.0 ? b_upper : -b_upper;
}

inline Corotating corotating(const SolutionContext& ctx, cplx z, bool with_b = false) {
  Corotating c = fdetail::corotating_at(ctx, z.real(), z.imag());
  if (with_b && c.valid) {
    c.f_Omega = cplx(c.e2U_Omega, corotating_b(ctx, z.real(), z.imag()));
    c.has_b = true;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Field samples with axis/equator dispatch
// ---------------------------------------------------------------------------

struct FieldSample {
  double rho = 0, zeta = 0;
  cplx f{};
  double e2U = 0, a = 0, e2kappa = 0;
  double err = 0;
};

inline FieldSample field_sample(const SolutionContext& ctx, double rho, double zeta) {
  const auto& P = ctx.params();
  if (std::hypot(rho - P.rho0, zeta) < 1e-6)
    throw RimPoint("field evaluation at the disk rim (no C^1 extension)");
  if (zeta < 0.0) {
    FieldSample s = field_sample(ctx, rho, -zeta);
    s.zeta = zeta;
    s.f = std::conj(s.f);
    return s;
  }
  FieldSample s;
  s.rho = rho;
  s.zeta = zeta;
  if (rho < ctx.rho_axis()) {
    const auto& opt = ctx.quad();
    s.f = axis_f(P, zeta, opt);
    s.e2U = axis_e2U(P, zeta, opt);
    s.a = 0.0;
    s.e2kappa = 1.0;
    s.err = 1e-11 + rho * rho;  // O(rho^2) truncation of the axis expansion
    return s;
  }
  double rho_eff = rho;
  const double bgap = P.half_gap();
  if (zeta == 0.0 && std::abs(rho - bgap) < 1e-6 * (1.0 + bgap)) {
    // at exactly rho = 1/(2 omega) on the equator the branch point -iz meets
    // k1 and the surface pinches; the fields are continuous there, so step off
    rho_eff = bgap + 2e-6 * (1.0 + bgap);
    s.err += 1e-5;
  }
  const cplx z(rho_eff, zeta);
  const auto d = ctx.zdata(z);
  s.f = ernst_f(d->geom, d->ui);
  s.e2U = metric_e2U(d->geom, d->ui);
  s.a = metric_a(d->geom, d->ui);
  s.e2kappa = metric_e2kappa(d->geom, d->ui, ctx.K0(), ctx.lreg(z));
  s.err = d->ui.err + d->ui.reality_defect + 1e-14;
  if (rho < 10.0 * ctx.rho_axis() && zeta > 0.0) {
    // blending band: the genus-1 and axis branches must agree to O(rho^2)
    const cplx f_axis = axis_f(P, zeta, ctx.quad());
    const double mismatch = std::abs(s.f - f_axis);
    if (mismatch > 100.0 * rho * rho + 100.0 * s.err) s.err = std::max(s.err, mismatch);
  }
  return s;
}

}  // namespace ernstdisk
