#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "ernstdisk/errors.hpp"
#include "ernstdisk/quadrature.hpp"

namespace ernstdisk {

// ---------------------------------------------------------------------------
// Disk parameters
// ---------------------------------------------------------------------------

// Rotating-disk configuration: radius rho0, angular velocity omega, subject to
// 2 omega rho0 < 1 so that the spectral branch points +-i/(2 omega) stay off
// the contour Gamma = [-i rho0, i rho0].
struct DiskParams {
  double rho0;
  double omega;
  cplx k1;    // -i/(2 omega)
  double a0;  // -1/(2 omega)

  DiskParams(double rho0_, double omega_) : rho0(rho0_), omega(omega_) {
    if (!(rho0 > 0.0) || !(omega > 0.0))
      throw InvalidParams("rho0 and omega must be positive");
    if (!(2.0 * omega * rho0 < 1.0))
      throw InvalidParams("parameters must satisfy 2*omega*rho0 < 1");
    k1 = cplx(0.0, -1.0 / (2.0 * omega));
    a0 = -1.0 / (2.0 * omega);
  }

  double half_gap() const { return 1.0 / (2.0 * omega); }  // |k1|
};

enum class Sheet { upper, lower };

// Side of an oriented branch cut, looking along the direction of travel of the
// cut path.  For the vertical cuts used here (oriented upward), left = west.
enum class CutSide { automatic, left, right };

struct SheetedPoint {
  cplx k;
  Sheet sheet = Sheet::upper;
  CutSide side = CutSide::automatic;
};

// ---------------------------------------------------------------------------
// Sheeted square roots
// ---------------------------------------------------------------------------

// sqrt((k-p)(k-q)) with branch cut on the straight segment [p,q], asymptotic
// to k - (p+q)/2 at infinity.  On the open cut the side must be resolvable:
// left of the oriented segment p->q corresponds to the upper side of the
// reference cut [-1,1] of tau = (k - (p+q)/2)/((q-p)/2).
inline cplx sqrt_two_point(cplx k, cplx p, cplx q, CutSide side = CutSide::automatic) {
  const cplx r = 0.5 * (q - p);
  if (std::abs(r) == 0.0) return k - 0.5 * (p + q);  // fully degenerate cut
  // tau -+ 1 formed from the exact branch-point offsets (no cancellation for
  // points generated as p + delta or q + delta)
  const cplx tau_m = (k - p) / r;  // tau + 1
  const cplx tau_q = (k - q) / r;  // tau - 1
  const double x = 0.5 * (tau_m.real() + tau_q.real());
  const double y = 0.5 * (tau_m.imag() + tau_q.imag());
  if (std::abs(x) < 1.0 && std::abs(y) <= 1e-14 * (1.0 + std::abs(x))) {
    double sgn;
    if (side == CutSide::left)
      sgn = +1.0;
    else if (side == CutSide::right)
      sgn = -1.0;
    else if (y != 0.0)
      sgn = (y > 0.0) ? +1.0 : -1.0;
    else
      throw OnCutWithoutSide("square root evaluated on a branch cut without a side tag");
    return r * cplx(0.0, sgn) * std::sqrt(-tau_q.real() * tau_m.real());
  }
  return r * std::sqrt(tau_q) * std::sqrt(tau_m);
}

// Same square root evaluated with the exact offset delta = k - bp from one of
// the two branch points (bp = q when from_q, else bp = p).  Needed inside
// graded quadrature legs: recomputing k - bp from a stored k loses all
// relative accuracy once |delta| approaches eps*|bp|.
inline cplx sqrt_two_point_offset(cplx delta, bool from_q, cplx p, cplx q,
                                  CutSide side = CutSide::automatic) {
  const cplx r = 0.5 * (q - p);
  if (std::abs(r) == 0.0) return delta;
  const cplx dr = delta / r;
  const cplx tau_m = from_q ? dr + 2.0 : dr;  // tau + 1
  const cplx tau_q = from_q ? dr : dr - 2.0;  // tau - 1
  const double x = 0.5 * (tau_m.real() + tau_q.real());
  const double y = 0.5 * (tau_m.imag() + tau_q.imag());
  if (std::abs(x) < 1.0 && std::abs(y) <= 1e-14 * (1.0 + std::abs(x))) {
    double sgn;
    if (side == CutSide::left)
      sgn = +1.0;
    else if (side == CutSide::right)
      sgn = -1.0;
    else if (y != 0.0)
      sgn = (y > 0.0) ? +1.0 : -1.0;
    else
      throw OnCutWithoutSide("square root evaluated on a branch cut without a side tag");
    return r * cplx(0.0, sgn) * std::sqrt(-tau_q.real() * tau_m.real());
  }
  return r * std::sqrt(tau_q) * std::sqrt(tau_m);
}

namespace sdetail {

// The cut C joining k1 to conj(k1) is the three-segment polyline through
// k1 - 1 and conj(k1) - 1.  Together with the straight segment [k1, conj(k1)]
// it bounds the open rectangle (-1,0) x (-|k1|, |k1|); moving the cut from the
// segment to the polyline flips the branch exactly inside that rectangle.
inline bool inside_flip_rectangle(const DiskParams& P, cplx k) {
  const double b = P.half_gap();
  return k.real() > -1.0 && k.real() < 0.0 && std::abs(k.imag()) < b;
}

inline bool on_polyline_cut(const DiskParams& P, cplx k) {
  const double b = P.half_gap();
  const double tol = 1e-13 * (1.0 + b);
  if (std::abs(k.real() + 1.0) <= tol && std::abs(k.imag()) <= b + tol) return true;
  if (k.real() >= -1.0 - tol && k.real() <= tol && std::abs(std::abs(k.imag()) - b) <= tol) return true;
  return false;
}

}  // namespace sdetail

// mu on the upper sheet of the degenerate (genus-0) surface
// mu^2 = (k-k1)(k-conj(k1)), branch cut along the polyline C, mu ~ +k at
// infinity.  On the segment [k1, conj(k1)] (which is not a cut) the value is
// continuous and positive on Gamma.  `polyline_side`: right = inside the flip
// rectangle.
inline cplx mu_upper(const DiskParams& P, cplx k, CutSide polyline_side = CutSide::automatic) {
  const cplx k1b = std::conj(P.k1);
  const cplx g = sqrt_two_point(k, P.k1, k1b, CutSide::right);
  bool flip = sdetail::inside_flip_rectangle(P, k);
  if (sdetail::on_polyline_cut(P, k)) {
    if (polyline_side == CutSide::automatic)
      throw OnCutWithoutSide("mu evaluated on the polyline cut without a side tag");
    flip = (polyline_side == CutSide::right);
  }
  return flip ? -g : g;
}

inline cplx mu_upper_deriv(const DiskParams& P, cplx k, CutSide polyline_side = CutSide::automatic) {
  return k / mu_upper(P, k, polyline_side);  // mu' = k/mu
}

// mu with the exact offset from k1 (from_conj = false) or conj(k1); only used
// on quadrature legs approaching those points from the east or along the
// segment, where the flip rectangle is not entered.
inline cplx mu_upper_offset(const DiskParams& P, cplx delta, bool from_conj) {
  const cplx k1b = std::conj(P.k1);
  const cplx g = sqrt_two_point_offset(delta, from_conj, P.k1, k1b, CutSide::right);
  const cplx k = (from_conj ? k1b : P.k1) + delta;
  return sdetail::inside_flip_rectangle(P, k) ? -g : g;
}

// ---------------------------------------------------------------------------
// Degenerate surface (axis limit)
// ---------------------------------------------------------------------------

struct DegenerateSurface {
  DiskParams params;
  explicit DegenerateSurface(const DiskParams& p) : params(p) {}
};

inline cplx mu_eval(const DegenerateSurface& d, const SheetedPoint& p) {
  const cplx m = mu_upper(d.params, p.k, p.side);
  return p.sheet == Sheet::upper ? m : -m;
}

// Abelian differential of the third kind on the degenerate surface with poles
// at zeta^+ / zeta^- (density against dk at p).
inline cplx omega3_prime(const DegenerateSurface& d, double zeta, const SheetedPoint& p) {
  if (std::abs(p.k - zeta) < 1e-14) throw std::invalid_argument("omega3_prime evaluated at its pole");
  const double b = d.params.half_gap();
  const double mu_zeta = std::hypot(zeta, b);  // mu(zeta^+) for zeta real > 0
  return mu_zeta / ((p.k - zeta) * mu_eval(d, p));
}

inline cplx omega3_prime_infinity(const DegenerateSurface& d, const SheetedPoint& p) {
  return -1.0 / mu_eval(d, p);
}

// ---------------------------------------------------------------------------
// The genus-1 surface for a field point z = rho + i zeta
// ---------------------------------------------------------------------------

// y^2 = (k - k1)(k - conj k1)(k + i z)(k - i conj z) as a two-sheeted cover of
// the k-plane with cuts along the polyline C (left) and the vertical segment
// [-iz, i conj z] (right).  The upper sheet has y ~ +k^2 at infinity.
//
// Conventions baked into the integral recipes:
//  * the a-cycle is the lift of the segment [k1, conj k1] to both sheets, so
//    1/A = 2 int_{k1}^{conj k1} dk/y on the upper sheet;
//  * the b-period starts from 2 int_{i conj z}^{conj k1} dk/y on the upper
//    sheet; its orientation and an integer a-period unit are then fixed by
//    Im B > 0 together with the Abel half-period identity (see
//    build_geometry), and Z is B/A afterwards;
//  * when zeta = 0 the right cut collides with the imaginary axis; integrands
//    along Gamma then take the left (west) limit, matching the continuous
//    extension from zeta > 0, while the path used for int_{-iz}^{i conj z}
//    omega keeps the east side.
struct SurfaceGeometry {
  DiskParams params;
  cplx z;
  double rho, zeta;
  cplx branch_lo;  // -i z
  cplx branch_hi;  // i conj z
  cplx A{}, Z{}, B{}, cI{};
  cplx bpath_raw{};      // one-sided int_{i conj z}^{conj k1} dk/y (upper sheet)
  cplx phi_inf_minus{};  // int_{-iz}^{inf^-} omega
  cplx psi_inf_minus{};  // int_{i conj z}^{inf^-} omega
  cplx chi{};            // int_{-iz}^{i conj z} omega (east side of the cut)
  double quad_err = 0.0;
  long evaluations = 0;

  SurfaceGeometry(const DiskParams& p, cplx z_)
      : params(p), z(z_), rho(z_.real()), zeta(z_.imag()),
        branch_lo(-kI * z_), branch_hi(kI * std::conj(z_)) {}

  cplx s_factor(cplx k, CutSide side = CutSide::automatic) const {
    return sqrt_two_point(k, branch_lo, branch_hi, side);
  }

  cplx y_upper(cplx k, CutSide s_side = CutSide::automatic, CutSide mu_side = CutSide::automatic) const {
    return mu_upper(params, k, mu_side) * s_factor(k, s_side);
  }

  // Gamma-side convention: west limit of the right cut (only relevant when the
  // cut has collided with the imaginary axis at zeta = 0).
  cplx y_west(cplx k) const { return y_upper(k, CutSide::left); }
  cplx y_east(cplx k) const { return y_upper(k, CutSide::right); }

  cplx y_eval(const SheetedPoint& p) const {
    CutSide s_side = CutSide::automatic, m_side = CutSide::automatic;
    if (p.side != CutSide::automatic) {
      if (sdetail::on_polyline_cut(params, p.k))
        m_side = p.side;
      else
        s_side = p.side;
    }
    const cplx y = y_upper(p.k, s_side, m_side);
    return p.sheet == Sheet::upper ? y : -y;
  }

  // y, y', y'' on the upper sheet with the Gamma-side convention.
  // mu' = k/mu, mu'' = |k1|^2/mu^3; s' = (k-zeta)/s, s'' = rho^2/s^3.
  std::array<cplx, 3> y_west_derivs(cplx k) const {
    const cplx mu = mu_upper(params, k);
    const cplx s = s_factor(k, CutSide::left);
    const cplx mu1 = k / mu;
    const double b = params.half_gap();
    const cplx mu2 = (b * b) / (mu * mu * mu);
    const cplx mid = 0.5 * (branch_lo + branch_hi);  // = zeta
    const cplx s1 = (k - mid) / s;
    const cplx s2 = (rho * rho) / (s * s * s);
    return {mu * s, mu1 * s + mu * s1, mu2 * s + 2.0 * mu1 * s1 + mu * s2};
  }

  // Stable divided difference D(k0,k) = [y(k) - y(k0) - y'(k0)(k-k0)]/(k-k0)^2
  // along the imaginary axis (Gamma-side values); switches to an integral
  // representation D = int_0^1 (1-t) y''(k0 + t(k-k0)) dt near the diagonal.
  // Falls back to the direct difference whenever a branch point sits on or
  // near the connecting segment (there y'' is large, so no cancellation).
  cplx y_divided_diff2_from(const std::array<cplx, 3>& d0, cplx k0, cplx k) const {
    const cplx h = k - k0;
    const double scale = 1.0 + std::abs(k0) + std::abs(k);
    const cplx mid = 0.5 * (k0 + k);
    const double bp_dist =
        std::min(std::min(std::abs(mid - branch_lo), std::abs(mid - branch_hi)),
                 std::min(std::abs(mid - params.k1), std::abs(mid - std::conj(params.k1))));
    if (std::abs(h) > 0.02 * scale || bp_dist < 10.0 * std::abs(h))
      return (y_west(k) - d0[0] - d0[1] * h) / (h * h);
    static constexpr double gl_x[5] = {0.04691007703066800, 0.23076534494715845, 0.5,
                                       0.76923465505284155, 0.95308992296933200};
    static constexpr double gl_w[5] = {0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
                                       0.23931433524968324, 0.11846344252809454};
    cplx acc = 0;
    for (int i = 0; i < 5; ++i) {
      const double t = gl_x[i];
      acc += gl_w[i] * (1.0 - t) * y_west_derivs(k0 + t * h)[2];
    }
    return acc;
  }

  cplx y_divided_diff2(cplx k0, cplx k) const { return y_divided_diff2_from(y_west_derivs(k0), k0, k); }
};

namespace sdetail {

inline double axis_threshold(const DiskParams& P) { return 1e-3 * P.rho0; }

enum class BranchId { none, k1, k1bar, lo, hi };

// Straight quadrature leg for kern(k)/y integrands.  Legs ending at a branch
// point carry its id so the graded transform can hand the exact offset to the
// square roots; `grade_*` requests endpoint clustering without an offset.
struct YLeg {
  cplx a, b;
  BranchId bp_a = BranchId::none, bp_b = BranchId::none;
  bool grade_a = false, grade_b = false;
};

inline cplx branch_position(const SurfaceGeometry& g, BranchId id) {
  switch (id) {
    case BranchId::k1: return g.params.k1;
    case BranchId::k1bar: return std::conj(g.params.k1);
    case BranchId::lo: return g.branch_lo;
    case BranchId::hi: return g.branch_hi;
    default: throw std::logic_error("branch_position: none");
  }
}

// 1/y on the upper sheet with the exact offset from the given branch point.
inline cplx inv_y_offset(const SurfaceGeometry& g, BranchId bp, cplx delta, CutSide s_side) {
  const auto& P = g.params;
  switch (bp) {
    case BranchId::lo: {
      const cplx k = g.branch_lo + delta;
      return 1.0 / (mu_upper(P, k) * sqrt_two_point_offset(delta, false, g.branch_lo, g.branch_hi, s_side));
    }
    case BranchId::hi: {
      const cplx k = g.branch_hi + delta;
      return 1.0 / (mu_upper(P, k) * sqrt_two_point_offset(delta, true, g.branch_lo, g.branch_hi, s_side));
    }
    case BranchId::k1: {
      const cplx k = P.k1 + delta;
      return 1.0 / (mu_upper_offset(P, delta, false) * g.s_factor(k, s_side));
    }
    case BranchId::k1bar: {
      const cplx k = std::conj(P.k1) + delta;
      return 1.0 / (mu_upper_offset(P, delta, true) * g.s_factor(k, s_side));
    }
    default:
      throw std::logic_error("inv_y_offset: none");
  }
}

// y, y', y'' (west convention, upper sheet) with the exact offset from a
// branch point; the vanishing square-root factor and its derivatives are all
// formed from delta so nothing cancels.
inline std::array<cplx, 3> y_west_derivs_offset(const SurfaceGeometry& g, BranchId bp, cplx delta) {
  const auto& P = g.params;
  const double b = P.half_gap();
  const cplx mid = 0.5 * (g.branch_lo + g.branch_hi);  // = zeta
  cplx mu, s, k;
  if (bp == BranchId::lo || bp == BranchId::hi) {
    const cplx pos = (bp == BranchId::lo) ? g.branch_lo : g.branch_hi;
    k = pos + delta;
    s = sqrt_two_point_offset(delta, bp == BranchId::hi, g.branch_lo, g.branch_hi, CutSide::left);
    mu = mu_upper(P, k);
  } else {
    const cplx pos = (bp == BranchId::k1) ? P.k1 : std::conj(P.k1);
    k = pos + delta;
    mu = mu_upper_offset(P, delta, bp == BranchId::k1bar);
    s = g.s_factor(k, CutSide::left);
  }
  const cplx mu1 = k / mu;
  const cplx mu2 = (b * b) / (mu * mu * mu);
  const cplx km = (bp == BranchId::lo || bp == BranchId::hi)
                      ? ((bp == BranchId::lo ? g.branch_lo : g.branch_hi) - mid) + delta
                      : k - mid;
  const cplx s1 = km / s;
  const cplx s2 = (g.rho * g.rho) / (s * s * s);
  return {mu * s, mu1 * s + mu * s1, mu2 * s + 2.0 * mu1 * s1 + mu * s2};
}

// Panels over the given legs for an integrand that may exploit the exact
// offset from a branch-point endpoint: F(k, bp, delta) with bp = none on
// plain panels.  Graded panels substitute k = endpoint + d u^2.
template <class F>
inline QuadratureResult integrate_offset_legs(const std::vector<YLeg>& legs, F f,
                                              const QuadratureOptions& opt) {
  std::vector<std::function<cplx(double)>> panels;
  auto add_affine = [&](cplx a, cplx b) {
    const cplx d = b - a;
    panels.push_back([f, a, d](double t) { return f(a + d * t, BranchId::none, cplx(0)) * d; });
  };
  auto add_graded = [&](cplx from, cplx to, BranchId bp, double orient) {
    const cplx d = to - from;
    panels.push_back([f, from, d, bp, orient](double u) {
      const cplx delta = d * (u * u);
      return f(from + delta, bp, delta) * (orient * 2.0 * u) * d;
    });
  };
  for (const auto& leg : legs) {
    const bool head = (leg.bp_a != BranchId::none) || leg.grade_a;
    const bool tail = (leg.bp_b != BranchId::none) || leg.grade_b;
    if (!head && !tail) {
      add_affine(leg.a, leg.b);
      continue;
    }
    const cplx m = 0.5 * (leg.a + leg.b);
    if (head)
      add_graded(leg.a, m, leg.bp_a, +1.0);
    else
      add_affine(leg.a, m);
    if (tail)
      add_graded(leg.b, m, leg.bp_b, -1.0);
    else
      add_affine(m, leg.b);
  }
  return qdetail::integrate_panels(panels, opt);
}

// Panels for int kern(k) / y dk over the given legs on the chosen sheet.
template <class Kern>
inline QuadratureResult integrate_inv_y(const SurfaceGeometry& g, const std::vector<YLeg>& legs,
                                        Kern kern, CutSide s_side, double sheet_sign,
                                        const QuadratureOptions& opt) {
  return integrate_offset_legs(
      legs,
      [&g, kern, s_side, sheet_sign](cplx k, BranchId bp, cplx delta) {
        const cplx inv_y =
            (bp == BranchId::none) ? 1.0 / g.y_upper(k, s_side) : inv_y_offset(g, bp, delta, s_side);
        return sheet_sign * kern(k) * inv_y;
      },
      opt);
}

// Legs along the imaginary axis from i*lo to i*hi.  Branch points of the
// collided cut (zeta = 0) become graded offset legs; for small zeta their
// projections are plain split points.
inline std::vector<YLeg> axis_y_legs(const SurfaceGeometry& g, double lo, double hi) {
  const double b = g.params.half_gap();
  struct Mark {
    double t;
    BranchId id;
    bool grade;
  };
  std::vector<Mark> marks = {{lo, BranchId::none, true}, {hi, BranchId::none, true}};
  if (std::abs(lo + b) < 1e-13) marks[0] = {lo, BranchId::k1, true};
  if (std::abs(hi - b) < 1e-13) marks[1] = {hi, BranchId::k1bar, true};
  auto interior = [&](double t) { return t > lo + 1e-13 && t < hi - 1e-13; };
  if (g.rho > 0.0 && (g.zeta == 0.0 || g.zeta < 0.05 * (1.0 + g.rho))) {
    if (interior(-g.rho)) marks.push_back({-g.rho, g.zeta == 0.0 ? BranchId::lo : BranchId::none, false});
    if (interior(+g.rho)) marks.push_back({+g.rho, g.zeta == 0.0 ? BranchId::hi : BranchId::none, false});
  }
  if (g.zeta == 0.0 && g.rho > b) {
    if (interior(-b)) marks.push_back({-b, BranchId::k1, true});
    if (interior(+b)) marks.push_back({+b, BranchId::k1bar, true});
  }
  std::sort(marks.begin(), marks.end(), [](const Mark& x, const Mark& y) { return x.t < y.t; });
  std::vector<YLeg> legs;
  for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
    YLeg L;
    L.a = cplx(0.0, marks[i].t);
    L.b = cplx(0.0, marks[i + 1].t);
    L.bp_a = marks[i].id;
    L.bp_b = marks[i + 1].id;
    L.grade_a = marks[i].grade || marks[i].id != BranchId::none;
    L.grade_b = marks[i + 1].grade || marks[i + 1].id != BranchId::none;
    legs.push_back(L);
  }
  return legs;
}

// Legs for the east-side path from -iz to i conj z along the right cut.
inline std::vector<YLeg> cut_y_legs(const SurfaceGeometry& g) {
  if (g.zeta == 0.0) {
    auto legs = axis_y_legs(g, -g.rho, g.rho);
    // terminal points are the collided-cut branch points themselves
    legs.front().bp_a = BranchId::lo;
    legs.back().bp_b = BranchId::hi;
    return legs;
  }
  const double b = g.params.half_gap();
  std::vector<double> hs = {-g.rho, g.rho};
  if (g.zeta < 0.05 && g.rho > 0.95 * b) {
    for (double t : {-b, b})
      if (t > -g.rho + 1e-13 && t < g.rho - 1e-13) hs.push_back(t);
  }
  std::sort(hs.begin(), hs.end());
  std::vector<YLeg> legs;
  for (std::size_t i = 0; i + 1 < hs.size(); ++i) {
    YLeg L;
    L.a = cplx(g.zeta, hs[i]);
    L.b = cplx(g.zeta, hs[i + 1]);
    if (i == 0) L.bp_a = BranchId::lo;
    if (i + 2 == hs.size()) L.bp_b = BranchId::hi;
    L.grade_a = true;
    L.grade_b = true;
    legs.push_back(L);
  }
  return legs;
}

}  // namespace sdetail

// Gamma legs for h(k)/y-type integrands.
inline std::vector<sdetail::YLeg> gamma_y_legs(const SurfaceGeometry& g) {
  return sdetail::axis_y_legs(g, -g.params.rho0, g.params.rho0);
}

inline SurfaceGeometry build_geometry(const DiskParams& P, cplx z, const QuadratureOptions& opt = {},
                                      double rho_axis = -1.0) {
  if (rho_axis < 0) rho_axis = sdetail::axis_threshold(P);
  if (z.imag() < 0.0) throw std::invalid_argument("build_geometry expects Im z >= 0 (use equatorial symmetry)");
  if (z.real() < rho_axis)
    throw DegenerateSurfaceError("rho below the axis threshold: use the degenerate-surface formulas");

  SurfaceGeometry g(P, z);
  const double b = P.half_gap();
  using sdetail::BranchId;
  using sdetail::YLeg;
  auto track = [&g](const QuadratureResult& r) {
    g.quad_err += r.error_estimate;
    g.evaluations += r.evaluations;
    return r.value;
  };
  auto one = [](cplx) { return cplx(1.0); };
  auto lin = [](cplx k) { return k; };

  // a-cycle integrals along the segment [k1, conj k1] (both sheets add)
  const auto aseg = sdetail::axis_y_legs(g, -b, b);
  const cplx ia = track(sdetail::integrate_inv_y(g, aseg, one, CutSide::left, +1.0, opt));
  const cplx ik = track(sdetail::integrate_inv_y(g, aseg, lin, CutSide::left, +1.0, opt));
  g.A = 1.0 / (2.0 * ia);
  g.cI = 2.0 * ik;

  // chi = int_{-iz}^{i conj z} omega along the east side of the right cut
  {
    const auto east = sdetail::cut_y_legs(g);
    const cplx ichi = track(sdetail::integrate_inv_y(g, east, one, CutSide::right, +1.0, opt));
    g.chi = g.A * ichi;
  }

  // b-period.  The raw two-sided path from i conj z to conj k1 determines B
  // only up to orientation and an a-period unit (the closure through the
  // branch points is ambiguous by a full turn around the left cut).  Both are
  // fixed by Im B > 0 together with the Abel-map half-period identity
  //   phi(conj k1) = chi + A * int_{i conj z}^{conj k1} dk/y == B/2 (mod 1, B),
  // which pins the basis actually used by the theta formulas.
  {
    YLeg leg{g.branch_hi, std::conj(P.k1), BranchId::hi, BranchId::k1bar, true, true};
    const cplx bval = track(sdetail::integrate_inv_y(g, {leg}, one, CutSide::left, +1.0, opt));
    g.bpath_raw = bval;
    const cplx B0 = g.A * 2.0 * bval;
    const cplx phi_k1bar = g.chi + g.A * bval;
    bool found = false;
    for (const double sigma : {+1.0, -1.0}) {
      if ((sigma * B0).imag() <= 0.0) continue;
      for (const double s : {0.0, 1.0, -1.0, 2.0, -2.0}) {
        const cplx Bc = sigma * B0 + s;
        cplx w = phi_k1bar - 0.5 * Bc;
        const double n = std::round(w.imag() / Bc.imag());
        w -= n * Bc;
        w -= std::round(w.real());
        if (std::abs(w) < 1e-7) {
          g.B = Bc;
          g.Z = Bc / g.A;
          found = true;
          break;
        }
      }
      if (found) break;
    }
    if (!found) throw NonPositiveImB("could not normalize the b-period against the Abel half-period identity");
  }

  // int_{-iz}^{inf^-} omega and int_{i conj z}^{inf^-} omega: east lane plus a
  // ray to infinity, entirely on the lower sheet (no cut crossings).
  {
    const double D = P.rho0 + b + g.rho + g.zeta + 2.0;
    auto lower_density = [&g](cplx k) { return -1.0 / g.y_upper(k); };
    {
      const cplx w1 = cplx(g.zeta + D, -g.rho);
      YLeg lane{g.branch_lo, w1, BranchId::lo, BranchId::none, true, false};
      cplx v = track(sdetail::integrate_inv_y(g, {lane}, one, CutSide::automatic, -1.0, opt));
      v += track(integrate_ray(lower_density, w1, opt));
      g.phi_inf_minus = g.A * v;
    }
    {
      const cplx w2 = cplx(g.zeta + D, g.rho);
      YLeg lane{g.branch_hi, w2, BranchId::hi, BranchId::none, true, false};
      cplx v = track(sdetail::integrate_inv_y(g, {lane}, one, CutSide::automatic, -1.0, opt));
      v += track(integrate_ray(lower_density, w2, opt));
      g.psi_inf_minus = g.A * v;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Abelian differentials of the third kind on the genus-1 surface
// ---------------------------------------------------------------------------

// omega_{inf+ inf-} density at p: -k/y(p) + cI * A / y(p); the a-period
// vanishes by construction.
inline cplx omega3_infinity(const SurfaceGeometry& g, const SheetedPoint& p) {
  const cplx y = g.y_eval(p);
  return -p.k / y + g.cI * g.A / y;
}

// a-period of the unnormalized pair kernel y(zeta^+)/((k - zeta) y(k)).
inline cplx omega3_pair_a_period(const SurfaceGeometry& g, double zeta_pole, const QuadratureOptions& opt = {}) {
  const double b = g.params.half_gap();
  const cplx yz = g.y_west(cplx(zeta_pole, 0.0));
  const auto aseg = sdetail::axis_y_legs(g, -b, b);
  auto r = sdetail::integrate_inv_y(
      g, aseg, [yz, zeta_pole](cplx k) { return yz / (k - zeta_pole); }, CutSide::left, +1.0, opt);
  return 2.0 * r.value;
}

// omega_{zeta+ zeta-} density at p for real zeta off the imaginary axis.
inline cplx omega3_pair(const SurfaceGeometry& g, double zeta_pole, const SheetedPoint& p,
                        const QuadratureOptions& opt = {}) {
  if (std::abs(p.k - zeta_pole) < 1e-14) throw std::invalid_argument("omega3_pair evaluated at its pole");
  const cplx yz = g.y_west(cplx(zeta_pole, 0.0));
  const cplx y = g.y_eval(p);
  const cplx aper = omega3_pair_a_period(g, zeta_pole, opt);
  return yz / ((p.k - zeta_pole) * y) - aper * g.A / y;
}

// ---------------------------------------------------------------------------
// Sheet-tracked path integration (general omega integrals, inversion oracle)
// ---------------------------------------------------------------------------

namespace sdetail {

struct TrackedLeg {
  cplx a, b;
  double sign;  // +1 upper sheet, -1 lower sheet
};

inline bool segments_cross(cplx a, cplx b, cplx p, cplx q, double& t_out) {
  // solves a + t(b-a) = p + s(q-p); returns strict interior crossings
  const cplx d1 = b - a, d2 = q - p;
  const double det = d1.real() * (-d2.imag()) - (-d2.real()) * d1.imag();
  if (std::abs(det) < 1e-15 * (std::abs(d1) * std::abs(d2) + 1e-300)) return false;
  const cplx rhs = p - a;
  const double t = (rhs.real() * (-d2.imag()) - (-d2.real()) * rhs.imag()) / det;
  const double s = (d1.real() * rhs.imag() - d1.imag() * rhs.real()) / det;
  if (t <= 1e-12 || t >= 1.0 - 1e-12 || s <= 1e-12 || s >= 1.0 - 1e-12) return false;
  t_out = t;
  return true;
}

// Splits a polyline at branch-cut crossings, flipping the sheet sign at each.
inline std::vector<TrackedLeg> track_sheet(const SurfaceGeometry& g, const std::vector<cplx>& path,
                                           Sheet start) {
  const double b = g.params.half_gap();
  const cplx k1 = g.params.k1, k1b = std::conj(g.params.k1);
  const std::array<std::pair<cplx, cplx>, 4> cuts = {{{k1, k1 - 1.0},
                                                      {k1 - 1.0, k1b - 1.0},
                                                      {k1b - 1.0, k1b},
                                                      {g.branch_lo, g.branch_hi}}};
  (void)b;
  std::vector<TrackedLeg> out;
  double sign = (start == Sheet::upper) ? +1.0 : -1.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const cplx a = path[i], q = path[i + 1];
    std::vector<double> ts;
    for (const auto& cut : cuts) {
      double t;
      if (segments_cross(a, q, cut.first, cut.second, t)) ts.push_back(t);
    }
    std::sort(ts.begin(), ts.end());
    cplx cur = a;
    for (double t : ts) {
      const cplx mid = a + t * (q - a);
      out.push_back({cur, mid, sign});
      sign = -sign;
      cur = mid;
    }
    out.push_back({cur, q, sign});
  }
  return out;
}

inline void check_clear_of_branch_points(const SurfaceGeometry& g, const std::vector<cplx>& path) {
  const std::array<cplx, 4> bps = {g.params.k1, std::conj(g.params.k1), g.branch_lo, g.branch_hi};
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const cplx a = path[i], q = path[i + 1];
    const cplx d = q - a;
    for (const cplx bp : bps) {
      const double t = ((bp - a) * std::conj(d)).real() / std::norm(d);
      if (t < 1e-9 || t > 1.0 - 1e-9) continue;
      if (std::abs(bp - (a + t * d)) < 1e-9 * (1.0 + std::abs(d)))
        throw PathThroughBranchPoint("integration path passes through a branch point");
    }
  }
}

}  // namespace sdetail

// int omega along the polyline [from.k, via..., to.k], starting on from.sheet,
// crossing branch cuts with automatic sheet tracking.  Endpoints at branch
// points are allowed (inverse-sqrt endpoint handling).  The homotopy class is
// the path's own; callers relying on a specific class must choose `via`
// accordingly (theta arguments are consumed modulo the period lattice).
inline cplx omega_integral(const SurfaceGeometry& g, const SheetedPoint& from, const SheetedPoint& to,
                           std::vector<cplx> via = {}, const QuadratureOptions& opt = {}) {
  std::vector<cplx> path;
  path.push_back(from.k);
  for (cplx w : via) path.push_back(w);
  path.push_back(to.k);
  if (std::abs(from.k - to.k) < 1e-15 && via.empty()) return 0.0;
  for (const cplx w : via)
    for (const cplx bp : {g.params.k1, std::conj(g.params.k1), g.branch_lo, g.branch_hi})
      if (std::abs(w - bp) < 1e-9)
        throw PathThroughBranchPoint("waypoint coincides with a branch point");
  sdetail::check_clear_of_branch_points(g, path);
  const auto legs = sdetail::track_sheet(g, path, from.sheet);
  const double end_sign = legs.back().sign;
  const double want = (to.sheet == Sheet::upper) ? +1.0 : -1.0;
  if (end_sign != want)
    throw std::invalid_argument("path ends on the wrong sheet; add waypoints or flip the target sheet");
  const std::array<cplx, 4> bps = {g.params.k1, std::conj(g.params.k1), g.branch_lo, g.branch_hi};
  cplx total = 0;
  for (const auto& leg : legs) {
    Contour c{leg.a, leg.b};
    for (const cplx bp : bps) {
      if (std::abs(leg.a - bp) < 1e-12) c.tag(0, EndpointSingularity::inverse_sqrt);
      if (std::abs(leg.b - bp) < 1e-12) c.tag(1, EndpointSingularity::inverse_sqrt);
    }
    const double sgn = leg.sign;
    total += integrate([&g, sgn](cplx k) { return 1.0 / (sgn * g.y_upper(k)); }, c, opt).value;
  }
  return g.A * total;
}

// int omega from a finite point to inf^+ / inf^- along an eastward lane and a
// ray, staying on one sheet (the lane is chosen to avoid all cuts).
inline cplx omega_integral_to_infinity(const SurfaceGeometry& g, const SheetedPoint& from, Sheet at_infinity,
                                       const QuadratureOptions& opt = {}) {
  if (from.sheet != at_infinity)
    throw std::invalid_argument("omega_integral_to_infinity: endpoints must lie on one sheet");
  const double D = g.params.rho0 + g.params.half_gap() + std::abs(from.k) + g.rho + g.zeta + 2.0;
  const cplx w = cplx(g.zeta + D, from.k.imag());
  const double sgn = (at_infinity == Sheet::upper) ? +1.0 : -1.0;
  auto density = [&g, sgn](cplx k) { return 1.0 / (sgn * g.y_upper(k)); };
  Contour lane{from.k, w};
  const std::array<cplx, 4> bps = {g.params.k1, std::conj(g.params.k1), g.branch_lo, g.branch_hi};
  for (const cplx bp : bps)
    if (std::abs(from.k - bp) < 1e-12) lane.tag(0, EndpointSingularity::inverse_sqrt);
  cplx v = integrate(density, lane, opt).value;
  v += integrate_ray(density, w, opt).value;
  return g.A * v;
}

// Ground-truth analytic continuation of y along a polyline: steps along the
// path keeping y continuous, refining until the step pattern is stable.  Used
// as the oracle for the branch conventions above.
inline cplx continue_y_along(const SurfaceGeometry& g, const std::vector<cplx>& path, cplx y_start) {
  auto run = [&](int steps_per_leg) {
    cplx y_prev = y_start;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const cplx dir = (path[i + 1] - path[i]) / std::abs(path[i + 1] - path[i]);
      for (int s = 1; s <= steps_per_leg; ++s) {
        cplx k = path[i] + (path[i + 1] - path[i]) * (static_cast<double>(s) / steps_per_leg);
        cplx cand;
        try {
          cand = g.y_upper(k);
        } catch (const OnCutWithoutSide&) {
          // step landed exactly on a cut: nudge perpendicular to the travel
          const cplx nudge = kI * dir * 1e-10 * (1.0 + std::abs(k));
          cand = g.y_upper(k + nudge);
        }
        y_prev = (std::abs(cand - y_prev) <= std::abs(-cand - y_prev)) ? cand : -cand;
      }
    }
    return y_prev;
  };
  cplx r1 = run(200);
  for (int n = 400; n <= 3200; n *= 2) {
    const cplx r2 = run(n);
    if (std::abs(r2 - r1) < 1e-12 * (1.0 + std::abs(r2))) return r2;
    r1 = r2;
  }
  return r1;
}

}  // namespace ernstdisk
