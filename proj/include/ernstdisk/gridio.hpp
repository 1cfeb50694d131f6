#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "ernstdisk/fields.hpp"
#include "ernstdisk/spectral.hpp"

namespace ernstdisk {

struct GridSpec {
  double rho_min = 0.0, rho_max = 3.0;
  double zeta_min = -2.0, zeta_max = 2.0;
  int nx = 61, ny = 81;

  void validate() const {
    if (!(rho_min < rho_max) || !(zeta_min < zeta_max)) throw InvalidParams("grid ranges must satisfy min < max");
    if (nx < 2 || ny < 2) throw InvalidParams("grid counts must be at least 2");
  }
};

inline std::string format_double(double v) {
  char buf[40];
  if (std::isnan(v)) return "nan";
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

struct GridRecord {
  double rho = 0, zeta = 0;
  FieldSample sample{};
  bool failed = false;
  std::string note;
};

inline int thread_budget() {
  if (const char* env = std::getenv("ERNST_DISK_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<int>(n);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Evaluates the grid row-major with rho fastest; output order is fixed no
// matter how many workers run.
inline std::vector<GridRecord> evaluate_grid(const SolutionContext& ctx, const GridSpec& spec,
                                             bool* any_failure = nullptr) {
  spec.validate();
  const auto& P = ctx.params();
  const std::size_t total = static_cast<std::size_t>(spec.nx) * spec.ny;
  std::vector<GridRecord> out(total);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) break;
      const int iy = static_cast<int>(idx) / spec.nx;
      const int ix = static_cast<int>(idx) % spec.nx;
      double rho = spec.rho_min + (spec.rho_max - spec.rho_min) * ix / (spec.nx - 1.0);
      double zeta = spec.zeta_min + (spec.zeta_max - spec.zeta_min) * iy / (spec.ny - 1.0);
      GridRecord& rec = out[idx];
      if (std::hypot(rho - P.rho0, zeta) < 1e-9) {
        rho += 1e-9 * (1.0 + P.rho0);  // nudge off the exact rim point
        rec.note = "nudged off rim";
      }
      rec.rho = rho;
      rec.zeta = zeta;
      try {
        rec.sample = field_sample(ctx, rho, zeta);
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.note = e.what();
        rec.sample.rho = rho;
        rec.sample.zeta = zeta;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rec.sample.f = cplx(nan, nan);
        rec.sample.e2U = rec.sample.a = rec.sample.e2kappa = rec.sample.err = nan;
        failed.store(true);
      }
    }
  };
  const int nthreads = std::min<long>(thread_budget(), static_cast<long>(total));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (any_failure) *any_failure = failed.load();
  return out;
}

inline void write_field_csv(std::ostream& os, const std::vector<GridRecord>& recs) {
  os << "rho,zeta,re_f,im_f,e2U,a,e2kappa,err\n";
  for (const auto& r : recs) {
    os << format_double(r.rho) << ',' << format_double(r.zeta) << ',' << format_double(r.sample.f.real())
       << ',' << format_double(r.sample.f.imag()) << ',' << format_double(r.sample.e2U) << ','
       << format_double(r.sample.a) << ',' << format_double(r.sample.e2kappa) << ','
       << format_double(r.sample.err) << '\n';
  }
}

inline void write_field_json(std::ostream& os, const std::vector<GridRecord>& recs) {
  os << "[\n";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    auto num = [](double v) { return std::isnan(v) ? std::string("null") : format_double(v); };
    os << "  {\"rho\": " << num(r.rho) << ", \"zeta\": " << num(r.zeta) << ", \"re_f\": "
       << num(r.sample.f.real()) << ", \"im_f\": " << num(r.sample.f.imag()) << ", \"e2U\": "
       << num(r.sample.e2U) << ", \"a\": " << num(r.sample.a) << ", \"e2kappa\": " << num(r.sample.e2kappa)
       << ", \"err\": " << num(r.sample.err);
    if (!r.note.empty()) os << ", \"note\": \"" << r.note << "\"";
    os << '}' << (i + 1 < recs.size() ? ",\n" : "\n");
  }
  os << "]\n";
}

struct AxisRecord {
  double zeta = 0;
  cplx f{};
  double e2U = 0;
  double Jprime = 0;
  double im_d = 0;
  std::optional<cplx> Kprime;
  double kprime_residual = 0;
};

inline std::vector<AxisRecord> evaluate_axis(const DiskParams& P, double zeta_max, int n,
                                             bool with_kprime, const QuadratureOptions& opt) {
  if (n < 2 || !(zeta_max > 0)) throw InvalidParams("axis profile needs n >= 2 and zeta_max > 0");
  std::vector<AxisRecord> out(n);
  for (int i = 0; i < n; ++i) {
    const double zeta = zeta_max * i / (n - 1.0);
    AxisRecord r;
    r.zeta = zeta;
    r.f = axis_f(P, zeta, opt);
    r.e2U = axis_e2U(P, zeta, opt);
    if (with_kprime) {
      const auto ad = axis_data(P, std::max(zeta, 1e-12), opt);
      r.Jprime = ad.Jprime;
      r.im_d = ad.d.imag();
      r.Kprime = ad.Kprime;
      r.kprime_residual = std::abs(ad.d + std::exp(-ad.Kprime));
    } else {
      const double b = P.half_gap();
      r.Jprime = spdetail::jprime(P, zeta, opt);
      r.im_d = (2.0 * kI * P.omega * (zeta - std::hypot(zeta, b))).imag();
    }
    out[i] = r;
  }
  return out;
}

inline void write_axis_csv(std::ostream& os, const std::vector<AxisRecord>& recs, bool with_kprime) {
  os << "zeta,re_f,im_f,e2U,Jprime,im_d";
  if (with_kprime) os << ",re_Kprime,im_Kprime,kprime_residual";
  os << '\n';
  for (const auto& r : recs) {
    os << format_double(r.zeta) << ',' << format_double(r.f.real()) << ',' << format_double(r.f.imag())
       << ',' << format_double(r.e2U) << ',' << format_double(r.Jprime) << ',' << format_double(r.im_d);
    if (with_kprime)
      os << ',' << format_double(r.Kprime ? r.Kprime->real() : 0.0) << ','
         << format_double(r.Kprime ? r.Kprime->imag() : 0.0) << ',' << format_double(r.kprime_residual);
    os << '\n';
  }
}

inline void write_axis_json(std::ostream& os, const std::vector<AxisRecord>& recs, bool with_kprime) {
  os << "[\n";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    os << "  {\"zeta\": " << format_double(r.zeta) << ", \"re_f\": " << format_double(r.f.real())
       << ", \"im_f\": " << format_double(r.f.imag()) << ", \"e2U\": " << format_double(r.e2U)
       << ", \"Jprime\": " << format_double(r.Jprime) << ", \"im_d\": " << format_double(r.im_d);
    if (with_kprime)
      os << ", \"re_Kprime\": " << format_double(r.Kprime ? r.Kprime->real() : 0.0)
         << ", \"im_Kprime\": " << format_double(r.Kprime ? r.Kprime->imag() : 0.0)
         << ", \"kprime_residual\": " << format_double(r.kprime_residual);
    os << '}' << (i + 1 < recs.size() ? ",\n" : "\n");
  }
  os << "]\n";
}

struct SpectralRecord {
  cplx k{};
  cplx F{}, G{}, E{}, d1{};
  double trms_residual = 0;
};

inline SpectralRecord evaluate_spectral(const DiskParams& P, cplx k, const QuadratureOptions& opt) {
  SpectralRecord r;
  r.k = k;
  const auto s = FG_of_k(P, k, opt);
  r.F = s.F;
  r.G = s.G;
  r.E = E_of_k(P, {k, Sheet::upper}, opt);
  r.d1 = d1_of_k(P, {k, Sheet::upper});
  r.trms_residual = std::abs(r.F * r.F - 1.0 + r.G * r.G - 4.0 * kI * k * P.omega * r.G * r.F);
  return r;
}

inline void write_spectral_csv(std::ostream& os, const std::vector<SpectralRecord>& recs) {
  os << "re_k,im_k,re_F,im_F,re_G,im_G,re_E,im_E,re_d1,im_d1,trms_residual\n";
  for (const auto& r : recs) {
    os << format_double(r.k.real()) << ',' << format_double(r.k.imag()) << ',' << format_double(r.F.real())
       << ',' << format_double(r.F.imag()) << ',' << format_double(r.G.real()) << ','
       << format_double(r.G.imag()) << ',' << format_double(r.E.real()) << ',' << format_double(r.E.imag())
       << ',' << format_double(r.d1.real()) << ',' << format_double(r.d1.imag()) << ','
       << format_double(r.trms_residual) << '\n';
  }
}

inline void write_spectral_json(std::ostream& os, const std::vector<SpectralRecord>& recs) {
  os << "[\n";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    os << "  {\"re_k\": " << format_double(r.k.real()) << ", \"im_k\": " << format_double(r.k.imag())
       << ", \"re_F\": " << format_double(r.F.real()) << ", \"im_F\": " << format_double(r.F.imag())
       << ", \"re_G\": " << format_double(r.G.real()) << ", \"im_G\": " << format_double(r.G.imag())
       << ", \"re_E\": " << format_double(r.E.real()) << ", \"im_E\": " << format_double(r.E.imag())
       << ", \"re_d1\": " << format_double(r.d1.real()) << ", \"im_d1\": " << format_double(r.d1.imag())
       << ", \"trms_residual\": " << format_double(r.trms_residual) << '}'
       << (i + 1 < recs.size() ? ",\n" : "\n");
  }
  os << "]\n";
}

}  // namespace ernstdisk
