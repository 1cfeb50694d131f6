#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <initializer_list>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "ernstdisk/errors.hpp"

namespace ernstdisk {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr cplx kI{0.0, 1.0};

// Endpoint behaviour declared by the caller.  inverse_sqrt activates the
// substitution k = a + (m-a) u^2 which removes |k-a|^{-1/2} singularities
// exactly; log_type uses k = a + (m-a) u^3 so that log(k-a) integrands become
// u^2 log u, smooth enough for the adaptive rule.
enum class EndpointSingularity { none, inverse_sqrt, log_type };

// Oriented piecewise-linear contour.  `singular[i]` tags vertex i; a tag on an
// interior vertex applies to both adjacent legs.
struct Contour {
  std::vector<cplx> vertices;
  std::vector<EndpointSingularity> singular;

  Contour() = default;
  Contour(std::initializer_list<cplx> vs) : vertices(vs) { singular.assign(vertices.size(), EndpointSingularity::none); }
  explicit Contour(std::vector<cplx> vs) : vertices(std::move(vs)) {
    singular.assign(vertices.size(), EndpointSingularity::none);
  }

  Contour& tag(std::size_t vertex, EndpointSingularity s) {
    singular.at(vertex) = s;
    return *this;
  }

  std::size_t legs() const { return vertices.size() < 2 ? 0 : vertices.size() - 1; }

  double length() const {
    double len = 0;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) len += std::abs(vertices[i + 1] - vertices[i]);
    return len;
  }

  Contour reversed() const {
    Contour r;
    r.vertices.assign(vertices.rbegin(), vertices.rend());
    r.singular.assign(singular.rbegin(), singular.rend());
    return r;
  }

  void validate() const {
    if (vertices.size() < 2) throw InvalidContour("contour needs at least 2 vertices");
    if (singular.size() != vertices.size()) throw InvalidContour("singularity tags out of sync with vertices");
    const double scale = 1.0 + length();
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
      if (std::abs(vertices[i + 1] - vertices[i]) <= 1e-15 * scale)
        throw InvalidContour("degenerate contour segment");
  }
};

struct QuadratureResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  long evaluations = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-14;
  long max_evals = 1'000'000;
};

namespace qdetail {

// 15-point Kronrod extension of the 7-point Gauss rule (abscissae on [-1,1]).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct RuleResult {
  cplx val;
  double err;     // sharpened |K15 - G7| estimate with a roundoff floor
  double resabs;  // int |f|
};

template <class G>
inline RuleResult gk15(G&& g, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  cplx fv[15];
  fv[7] = g(c);
  for (int j = 0; j < 7; ++j) {
    fv[j] = g(c - h * kXgk[j]);
    fv[14 - j] = g(c + h * kXgk[j]);
  }
  cplx resk = kWgk[7] * fv[7];
  cplx resg = kWg[3] * fv[7];
  double resabs = kWgk[7] * std::abs(fv[7]);
  for (int j = 0; j < 7; ++j) {
    resk += kWgk[j] * (fv[j] + fv[14 - j]);
    resabs += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) resg += kWg[(j - 1) / 2] * (fv[j] + fv[14 - j]);
  }
  const cplx mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
  resasc *= std::abs(h);
  resabs *= std::abs(h);
  double err = std::abs(h) * std::abs(resk - resg);
  if (resasc > 0.0 && err > 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  err = std::max(err, 50.0 * 2.22e-16 * resabs);
  if (!std::isfinite(err) || !std::isfinite(resk.real()) || !std::isfinite(resk.imag()))
    err = std::numeric_limits<double>::infinity();
  return {h * resk, err, resabs};
}

struct Piece {
  int fn;  // index into the panel integrand list
  double a, b;
  cplx val;
  double err;
  bool frozen;  // refinement stopped (roundoff-dominated or too narrow)
};

// Globally adaptive bisection over a set of 1-D panels on [0,1].  Pieces too
// narrow to split are frozen; their error still counts toward the estimate.
inline QuadratureResult integrate_panels(const std::vector<std::function<cplx(double)>>& panels,
                                         const QuadratureOptions& opt) {
  std::vector<Piece> pieces;
  pieces.reserve(64);
  long evals = 0;
  cplx total = 0;
  double toterr = 0;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    auto r = gk15(panels[i], 0.0, 1.0);
    evals += 15;
    pieces.push_back({static_cast<int>(i), 0.0, 1.0, r.val, r.err, false});
    total += r.val;
    toterr += r.err;
  }
  auto tol = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (toterr > tol()) {
    std::size_t worst = pieces.size();
    double werr = 0;
    for (std::size_t i = 0; i < pieces.size(); ++i)
      if (!pieces[i].frozen && pieces[i].err > werr) { werr = pieces[i].err; worst = i; }
    if (worst == pieces.size()) {
      // everything frozen: roundoff-limited; accept if within a sane multiple
      if (toterr <= std::max(100.0 * tol(), 1e-9 * (1.0 + std::abs(total)))) break;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", toterr);
      throw NonConvergence(std::string("adaptive quadrature stalled at estimate ") + buf);
    }
    Piece p = pieces[worst];
    if (p.b - p.a < 1e-13) {
      pieces[worst].frozen = true;
      continue;
    }
    if (evals + 30 > opt.max_evals) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3e", toterr);
      throw NonConvergence(std::string("quadrature evaluation budget exhausted (estimate ") + buf + ")");
    }
    const double m = 0.5 * (p.a + p.b);
    auto r1 = gk15(panels[p.fn], p.a, m);
    auto r2 = gk15(panels[p.fn], m, p.b);
    evals += 30;
    total += r1.val + r2.val - p.val;
    toterr += r1.err + r2.err - p.err;
    pieces[worst] = {p.fn, p.a, m, r1.val, r1.err, false};
    pieces.push_back({p.fn, m, p.b, r2.val, r2.err, false});
  }
  return {total, toterr, evals};
}

// Appends the transformed panels for one straight leg a -> b.
template <class F>
inline void add_leg_panels(std::vector<std::function<cplx(double)>>& out, const F& f, cplx a, cplx b,
                           EndpointSingularity sa, EndpointSingularity sb) {
  auto affine = [&out, &f](cplx p, cplx q) {
    const cplx d = q - p;
    out.push_back([f, p, d](double t) { return f(p + d * t) * d; });
  };
  if (sa == EndpointSingularity::none && sb == EndpointSingularity::none) {
    affine(a, b);
    return;
  }
  const cplx m = 0.5 * (a + b);
  auto graded = [&out, &f](cplx p, cplx q, EndpointSingularity s, double orient) {
    // integrates from p (singular end) to q when orient=+1, reversed when -1
    const cplx d = q - p;
    if (s == EndpointSingularity::inverse_sqrt) {
      out.push_back([f, p, d, orient](double u) { return f(p + d * (u * u)) * (orient * 2.0 * u) * d; });
    } else {
      out.push_back([f, p, d, orient](double u) { return f(p + d * (u * u * u)) * (orient * 3.0 * u * u) * d; });
    }
  };
  if (sa == EndpointSingularity::none)
    affine(a, m);
  else
    graded(a, m, sa, +1.0);
  if (sb == EndpointSingularity::none)
    affine(m, b);
  else
    graded(b, m, sb, -1.0);
}

}  // namespace qdetail

// \int_c f dk over a polyline contour with declared endpoint singularities.
template <class F>
inline QuadratureResult integrate(const F& f, const Contour& c, const QuadratureOptions& opt = {}) {
  c.validate();
  std::vector<std::function<cplx(double)>> panels;
  panels.reserve(2 * c.legs());
  for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i)
    qdetail::add_leg_panels(panels, f, c.vertices[i], c.vertices[i + 1], c.singular[i], c.singular[i + 1]);
  return qdetail::integrate_panels(panels, opt);
}

template <class F>
inline QuadratureResult integrate(const F& f, const Contour& c, double abs_tol) {
  QuadratureOptions opt;
  opt.abs_tol = abs_tol;
  return integrate(f, c, opt);
}

// Convenience wrapper: graded meshes at both terminal endpoints for integrands
// with (at most) logarithmic endpoint growth.
template <class F>
inline QuadratureResult integrate_log_endpoint(const F& f, Contour c, const QuadratureOptions& opt = {}) {
  if (c.vertices.size() >= 2) {
    if (c.singular.size() != c.vertices.size()) c.singular.assign(c.vertices.size(), EndpointSingularity::none);
    if (c.singular.front() == EndpointSingularity::none) c.singular.front() = EndpointSingularity::log_type;
    if (c.singular.back() == EndpointSingularity::none) c.singular.back() = EndpointSingularity::log_type;
  }
  return integrate(f, c, opt);
}

// log((b-p)/(a-p)) continued along the straight segment a -> b (p off the
// segment); splits recursively so no piece subtends more than ~1.5 rad.
inline cplx log_ratio_along_segment(cplx a, cplx b, cplx p, int depth = 0) {
  if (depth > 64) throw NumericalError("log continuation along segment failed to converge");
  const cplx w1 = a - p, w2 = b - p;
  if (w1 == cplx(0) || w2 == cplx(0)) throw std::invalid_argument("log endpoint at pole");
  const cplx ratio = w2 / w1;
  if (std::abs(std::arg(ratio)) < 1.5) return std::log(ratio);
  const cplx m = 0.5 * (a + b);
  return log_ratio_along_segment(a, m, p, depth + 1) + log_ratio_along_segment(m, b, p, depth + 1);
}

namespace qdetail {

struct PoleLocation {
  std::size_t leg;
  double t;  // affine parameter of the projection onto the leg
};

inline PoleLocation locate_pole(const Contour& c, cplx p) {
  const double scale = c.length() + 1.0;
  for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i) {
    const cplx a = c.vertices[i], b = c.vertices[i + 1];
    const cplx d = b - a;
    const double t = ((p - a) * std::conj(d)).real() / std::norm(d);
    if (t < -1e-12 || t > 1.0 + 1e-12) continue;
    if (std::abs(p - (a + t * d)) > 1e-10 * scale) continue;
    if (std::abs(p - a) < 1e-9 * scale || std::abs(p - b) < 1e-9 * scale)
      throw PoleOnVertex("principal-value pole coincides with a contour vertex");
    return {i, t};
  }
  throw std::invalid_argument("principal-value pole does not lie on the contour");
}

}  // namespace qdetail

// Cauchy principal value of \int_c f dk where f has one simple pole at p in
// the interior of a leg.  The pole term residue/(k-p) is subtracted
// analytically and its principal value added back in closed form; the residue
// is extrapolated from (k-p) f(k) unless supplied.
template <class F>
inline QuadratureResult integrate_pv(const F& f, const Contour& c, cplx p, const QuadratureOptions& opt = {},
                                     std::optional<cplx> residue = std::nullopt) {
  c.validate();
  const auto loc = qdetail::locate_pole(c, p);
  const cplx a = c.vertices[loc.leg], b = c.vertices[loc.leg + 1];
  const cplx e = (b - a) / std::abs(b - a);
  long extra_evals = 0;
  cplx r;
  if (residue) {
    r = *residue;
  } else {
    auto sym = [&](double d) {
      const cplx kp = p + d * e, km = p - d * e;
      return 0.5 * ((kp - p) * f(kp) + (km - p) * f(km));
    };
    const double d1 = 1e-3 * std::abs(b - a);
    const cplx s1 = sym(d1), s2 = sym(0.5 * d1);
    r = (4.0 * s2 - s1) / 3.0;
    extra_evals = 4;
  }
  // exact principal value of r/(k-p) over the polyline
  cplx pvlog = 0;
  for (std::size_t i = 0; i + 1 < c.vertices.size(); ++i) {
    const cplx va = c.vertices[i], vb = c.vertices[i + 1];
    if (i == loc.leg)
      pvlog += std::log(std::abs(vb - p) / std::abs(va - p));
    else
      pvlog += log_ratio_along_segment(va, vb, p);
  }
  // regular remainder, with the pole made a contour vertex
  Contour split;
  split.vertices.reserve(c.vertices.size() + 1);
  split.singular.reserve(c.vertices.size() + 1);
  for (std::size_t i = 0; i < c.vertices.size(); ++i) {
    split.vertices.push_back(c.vertices[i]);
    split.singular.push_back(c.singular[i]);
    if (i == loc.leg) {
      split.vertices.push_back(p);
      split.singular.push_back(EndpointSingularity::none);
    }
  }
  auto rem = integrate([&f, r, p](cplx k) { return f(k) - r / (k - p); }, split, opt);
  return {rem.value + r * pvlog, rem.error_estimate, rem.evaluations + extra_evals};
}

// \int from `from` to infinity along the ray through the origin and `from`,
// for integrands decaying like k^{-2}.  Substitution k = from/u maps the ray
// onto u in (0,1].
template <class F>
inline QuadratureResult integrate_ray(const F& f, cplx from, const QuadratureOptions& opt = {}) {
  if (std::abs(from) == 0.0) throw std::invalid_argument("ray base point must be nonzero");
  std::vector<std::function<cplx(double)>> panels;
  panels.push_back([f, from](double u) { return f(from / u) * from / (u * u); });
  return qdetail::integrate_panels(panels, opt);
}

enum class DeformSide { left, right };

// Replaces the straight passage through `pole` by a square detour of
// half-width eps on the requested side of the direction of travel.
inline Contour deform_through_pole(const Contour& c, cplx pole, double eps, DeformSide side) {
  c.validate();
  const auto loc = qdetail::locate_pole(c, pole);
  const cplx a = c.vertices[loc.leg], b = c.vertices[loc.leg + 1];
  const cplx e = (b - a) / std::abs(b - a);
  const cplx n = (side == DeformSide::left ? kI : -kI) * e;
  Contour out;
  for (std::size_t i = 0; i < c.vertices.size(); ++i) {
    out.vertices.push_back(c.vertices[i]);
    out.singular.push_back(c.singular[i]);
    if (i == loc.leg) {
      for (const cplx w : {pole - eps * e, pole - eps * e + eps * n, pole + eps * e + eps * n, pole + eps * e}) {
        out.vertices.push_back(w);
        out.singular.push_back(EndpointSingularity::none);
      }
    }
  }
  return out;
}

}  // namespace ernstdisk
