// Command-line interface for the rotating-disk Neumann problem solver:
// field grids, axis profiles, spectral data, and the verification suite.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ernstdisk/ernstdisk.hpp"

namespace {

using namespace ernstdisk;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitBadParams = 4;

struct CommonOpts {
  double rho0 = 1.0;
  double omega = 0.3;
  double tol = 1e-10;
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 20240801u;
};

int write_output(const std::string& path, const std::string& payload) {
  if (path.empty() || path == "-") {
    std::cout << payload;
    return std::cout ? kExitOk : kExitIo;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    std::cerr << "error: cannot open output file '" << path << "'\n";
    return kExitIo;
  }
  os << payload;
  return os ? kExitOk : kExitIo;
}

bool parse_grid(const std::string& s, int& nx, int& ny) {
  const auto x = s.find('x');
  if (x == std::string::npos) return false;
  try {
    nx = std::stoi(s.substr(0, x));
    ny = std::stoi(s.substr(x + 1));
  } catch (...) {
    return false;
  }
  return nx >= 2 && ny >= 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact rotating-disk solution of the Ernst equation (Neumann boundary data)"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts C;
  app.add_option("--rho0", C.rho0, "disk radius")->required();
  app.add_option("--omega", C.omega, "angular velocity")->required();
  app.add_option("--tol", C.tol, "absolute tolerance per 1-D integral")->capture_default_str();
  app.add_option("--out", C.out, "output path ('-' = stdout)");
  app.add_option("--format", C.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", C.seed, "seed for randomized checks");

  auto* field = app.add_subcommand("field", "evaluate the Ernst potential and metric functions on a grid");
  std::string grid_str = "61x81";
  std::pair<double, double> rho_range{0.0, 3.0}, zeta_range{-2.0, 2.0};
  field->add_option("--grid", grid_str, "grid size AxB (rho x zeta)")->capture_default_str();
  field->add_option("--rho-range", rho_range, "rho min max")->capture_default_str();
  field->add_option("--zeta-range", zeta_range, "zeta min max")->capture_default_str();

  auto* axis = app.add_subcommand("axis", "evaluate the solution profile along the rotation axis");
  double zeta_max = 5.0;
  int axis_n = 101;
  bool with_kprime = false;
  axis->add_option("--zeta-max", zeta_max, "largest zeta")->capture_default_str();
  axis->add_option("--n", axis_n, "number of samples")->capture_default_str();
  axis->add_flag("--with-kprime", with_kprime, "also emit K' and the -e^{-K'} = d residual");

  auto* verify = app.add_subcommand("verify", "run the self-verification suite");
  std::string level = "fast";
  verify->add_option("--level", level, "fast|full")->check(CLI::IsMember({"fast", "full"}));

  auto* spectral = app.add_subcommand("spectral", "evaluate the spectral functions F, G, E, d1");
  std::vector<std::string> k_list;
  spectral->add_option("--k", k_list, "evaluation point re,im (repeatable)")->required();

  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<DiskParams> P;
  try {
    P = std::make_unique<DiskParams>(C.rho0, C.omega);
  } catch (const InvalidParams& e) {
    std::cerr << "error: " << e.what()
              << " (the construction requires 2*omega*rho0 < 1; got 2*" << C.omega << "*" << C.rho0 << " = "
              << 2.0 * C.omega * C.rho0 << ")\n";
    return kExitBadParams;
  }
  QuadratureOptions qo;
  qo.abs_tol = C.tol;
  SolutionContext ctx(*P, qo);

  try {
    if (field->parsed()) {
      GridSpec spec;
      if (!parse_grid(grid_str, spec.nx, spec.ny)) {
        std::cerr << "error: bad --grid '" << grid_str << "'\n";
        return kExitBadParams;
      }
      spec.rho_min = rho_range.first;
      spec.rho_max = rho_range.second;
      spec.zeta_min = zeta_range.first;
      spec.zeta_max = zeta_range.second;
      bool failures = false;
      const auto recs = evaluate_grid(ctx, spec, &failures);
      std::ostringstream os;
      if (C.format == "csv")
        write_field_csv(os, recs);
      else
        write_field_json(os, recs);
      const int io = write_output(C.out, os.str());
      if (io != kExitOk) return io;
      for (const auto& r : recs)
        if (r.failed) std::cerr << "note: (" << r.rho << ", " << r.zeta << "): " << r.note << "\n";
      return failures ? kExitNumeric : kExitOk;
    }

    if (axis->parsed()) {
      const auto recs = evaluate_axis(*P, zeta_max, axis_n, with_kprime, qo);
      std::ostringstream os;
      if (C.format == "csv")
        write_axis_csv(os, recs, with_kprime);
      else
        write_axis_json(os, recs, with_kprime);
      return write_output(C.out, os.str());
    }

    if (verify->parsed()) {
      const SuiteLevel lv = (level == "full") ? SuiteLevel::full : SuiteLevel::fast;
      const VerificationReport rep = run_suite(ctx, lv, C.seed);
      const int io = write_output(C.out, rep.to_json());
      if (io != kExitOk) return io;
      if (!rep.all_passed()) {
        for (const auto& c : rep.checks)
          if (!c.passed)
            std::cerr << "FAILED " << c.name << ": measured " << c.measured << " tolerance " << c.tolerance
                      << "\n";
        return kExitVerifyFailed;
      }
      return kExitOk;
    }

    if (spectral->parsed()) {
      std::vector<SpectralRecord> recs;
      for (const auto& item : k_list) {
        const auto comma = item.find(',');
        if (comma == std::string::npos) {
          std::cerr << "error: bad --k '" << item << "' (expected re,im)\n";
          return kExitBadParams;
        }
        const cplx k(std::stod(item.substr(0, comma)), std::stod(item.substr(comma + 1)));
        recs.push_back(evaluate_spectral(*P, k, qo));
      }
      std::ostringstream os;
      if (C.format == "csv")
        write_spectral_csv(os, recs);
      else
        write_spectral_json(os, recs);
      return write_output(C.out, os.str());
    }
  } catch (const NumericalError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadParams;
  }
  return kExitOk;
}
