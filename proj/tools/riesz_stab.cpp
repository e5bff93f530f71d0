// riesz-stab: command-line front end.
//
//   minimize   multistart Riesz energy minimization in a cube or ball
//   constants  closed-form energy integrals and asymptotic constants
//   certify    stability certificate for a potential config
//   verify     falsification trials against a stored certificate
//   scan       CSV sweep of the SS condition over lambda, or of constants over s
//
// Exit codes: 0 success, 1 computation error, 2 certificate Unknown,
// 3 certificate Unstable, 5 counterexample found by verify, 64 usage error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rstab/certifier.hpp"
#include "rstab/error.hpp"
#include "rstab/io.hpp"
#include "rstab/minimizer.hpp"
#include "rstab/riesz.hpp"

namespace {

using rstab::io::Json;

constexpr int kExitUsage = 64;
constexpr int kExitUnknown = 2;
constexpr int kExitUnstable = 3;
constexpr int kExitCounterexample = 5;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void apply_thread_cap() {
  const char* env = std::getenv("RIESZ_STAB_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw UsageError("RIESZ_STAB_THREADS must be a positive integer");
#ifdef _OPENMP
  omp_set_num_threads(static_cast<int>(n));
#endif
}

rstab::Domain parse_domain(const std::string& spec, int d) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("--domain must look like cube:<rib> or ball:<radius>");
  const std::string kind = spec.substr(0, colon);
  double size = 0.0;
  try {
    std::size_t used = 0;
    size = std::stod(spec.substr(colon + 1), &used);
    if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("--domain size is not a number: " + spec);
  }
  if (kind == "cube") return rstab::Domain::cube(d, size);
  if (kind == "ball") return rstab::Domain::ball(d, size);
  throw UsageError("--domain kind must be cube or ball");
}

// Aligned two-column table of the scalar leaves of a JSON object.
void print_table(std::ostream& out, const Json& j, const std::string& prefix = {}) {
  std::vector<std::pair<std::string, std::string>> rows;
  auto collect = [&](auto&& self, const Json& node, const std::string& path) -> void {
    if (node.is_object()) {
      for (const auto& [k, v] : node.items()) self(self, v, path.empty() ? k : path + "." + k);
    } else if (node.is_array()) {
      if (!node.empty() && node.front().is_object()) {
        for (std::size_t i = 0; i < node.size(); ++i) self(self, node[i], path + "[" + std::to_string(i) + "]");
      } else {
        rows.emplace_back(path, "[" + std::to_string(node.size()) + " items]");
      }
    } else if (node.is_number_float()) {
      rows.emplace_back(path, rstab::io::format_double(node.get<double>()));
    } else if (node.is_string()) {
      rows.emplace_back(path, node.get<std::string>());
    } else {
      rows.emplace_back(path, node.dump());
    }
  };
  collect(collect, j, prefix);
  std::size_t width = 0;
  for (const auto& [k, v] : rows) width = std::max(width, k.size());
  for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
}

void emit(const Json& j, const std::string& format, const std::string& out_path) {
  std::ostringstream text;
  if (format == "table") {
    print_table(text, j);
  } else {
    text << j.dump(2) << '\n';
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << text.str();
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + out_path);
  f << text.str();
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::vector<double> geometric_grid(double from, double to, int steps) {
  if (steps < 1) throw UsageError("--steps must be >= 1");
  if (steps == 1) return {from};
  std::vector<double> grid;
  if (from > 0.0 && to > 0.0) {
    for (int i = 0; i < steps; ++i) grid.push_back(from * std::pow(to / from, static_cast<double>(i) / (steps - 1)));
  } else {
    for (int i = 0; i < steps; ++i) grid.push_back(from + (to - from) * i / (steps - 1));
  }
  return grid;
}

std::string cell(double v) { return std::isfinite(v) ? rstab::io::format_double(v) : ""; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riesz energies and stability certificates for pair potentials", "riesz-stab"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "json";
  std::string out_path;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}))->capture_default_str();
  app.add_option("-o,--out", out_path, "Write output to this file instead of stdout");

  // minimize
  auto* min_cmd = app.add_subcommand("minimize", "Minimize the Riesz s-energy of N points");
  int min_d = 1;
  double min_s = 1.0;
  std::size_t min_n = 2;
  std::string min_domain = "cube:1";
  std::size_t min_starts = 0;
  std::uint64_t min_seed = 1;
  double min_tol = 1e-9;
  int min_iters = 50000;
  std::string min_csv;
  min_cmd->add_option("-d,--dimension", min_d, "Dimension")->required()->check(CLI::Range(1, 64));
  min_cmd->add_option("-s", min_s, "Riesz exponent (> 0)")->required();
  min_cmd->add_option("-N,--points", min_n, "Number of points")->required();
  min_cmd->add_option("--domain", min_domain, "cube:<rib> or ball:<radius>, centred at the origin")->capture_default_str();
  min_cmd->add_option("--starts", min_starts, "Random starts (0 means 8 + 2N)")->capture_default_str();
  min_cmd->add_option("--seed", min_seed, "Seed; start k uses seed + k")->capture_default_str();
  min_cmd->add_option("--grad-tol", min_tol, "Stop when |projected gradient| <= grad-tol * N")->capture_default_str();
  min_cmd->add_option("--max-iters", min_iters, "Iteration cap per start")->capture_default_str();
  min_cmd->add_option("--csv", min_csv, "Also write the configuration CSV here");

  // constants
  auto* const_cmd = app.add_subcommand("constants", "Closed-form energy integrals and constants");
  int c_d = 3;
  double c_s = 1.0;
  double c_radius = 1.0;
  double c_lambda = 1.0;
  double c_phi0 = 1.0;
  const_cmd->add_option("-d,--dimension", c_d, "Dimension")->required()->check(CLI::Range(1, 64));
  const_cmd->add_option("-s", c_s, "Riesz exponent (>= 0)")->required();
  const_cmd->add_option("--radius", c_radius, "Ball radius for the energy integral")->capture_default_str();
  const_cmd->add_option("--lambda", c_lambda, "Cube rib for C_d and C_sd")->capture_default_str();
  const_cmd->add_option("--phi0", c_phi0, "Core strength for C_d and C_sd")->capture_default_str();

  // certify
  auto* cert_cmd = app.add_subcommand("certify", "Classify a potential as Unstable/Unknown/S/SS/SSS");
  std::string cert_potential;
  std::vector<double> cert_lambdas;
  double cert_eps = 0.0;
  std::size_t cert_nmax = 12;
  std::size_t cert_starts = 0;
  std::uint64_t cert_seed = 1;
  cert_cmd->add_option("--potential", cert_potential, "Potential config file (key = value)")->required();
  cert_cmd->add_option("--lambda", cert_lambdas, "Cell ribs to try (default: core_radius/sqrt(d) halved 8 times)");
  cert_cmd->add_option("--epsilon", cert_eps, "Epsilon (0 means the regime default)")->capture_default_str();
  cert_cmd->add_option("--n-max", cert_nmax, "Largest N minimized for the e-sequence (s < d)")->capture_default_str();
  cert_cmd->add_option("--starts", cert_starts, "Minimizer starts (0 means 8 + 2N)")->capture_default_str();
  cert_cmd->add_option("--seed", cert_seed, "Minimizer seed")->capture_default_str();

  // verify
  auto* ver_cmd = app.add_subcommand("verify", "Run random falsification trials against a certificate");
  std::string ver_potential;
  std::string ver_cert;
  rstab::SamplerOptions ver_opts;
  ver_cmd->add_option("--potential", ver_potential, "Potential config file")->required();
  ver_cmd->add_option("--certificate", ver_cert, "Certificate JSON written by certify")->required();
  ver_cmd->add_option("--trials", ver_opts.trials, "Number of random configurations")->capture_default_str();
  ver_cmd->add_option("--n-max", ver_opts.n_max, "Largest configuration size")->capture_default_str();
  ver_cmd->add_option("--box", ver_opts.box_rib, "Rib of the sampling box")->capture_default_str();
  ver_cmd->add_option("--seed", ver_opts.seed, "Trial t uses seed + t")->capture_default_str();

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "CSV sweep over lambda (SS condition) or s (constants)");
  std::string scan_over = "lambda";
  std::string scan_potential;
  double scan_from = 0.0;
  double scan_to = 0.0;
  int scan_steps = 8;
  int scan_d = 3;
  double scan_lambda = 1.0;
  double scan_phi0 = 1.0;
  scan_cmd->add_option("--over", scan_over, "lambda or s")->check(CLI::IsMember({"lambda", "s"}))->capture_default_str();
  scan_cmd->add_option("--potential", scan_potential, "Potential config (required for --over lambda)");
  scan_cmd->add_option("--from", scan_from, "First grid value")->required();
  scan_cmd->add_option("--to", scan_to, "Last grid value")->required();
  scan_cmd->add_option("--steps", scan_steps, "Grid size (geometric when both ends are > 0)")->capture_default_str();
  scan_cmd->add_option("-d,--dimension", scan_d, "Dimension for --over s")->capture_default_str()->check(CLI::Range(1, 64));
  scan_cmd->add_option("--lambda", scan_lambda, "Cube rib for --over s")->capture_default_str();
  scan_cmd->add_option("--phi0", scan_phi0, "Core strength for --over s")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    apply_thread_cap();

    if (*min_cmd) {
      const auto dom = parse_domain(min_domain, min_d);
      rstab::MinimizeOptions opts;
      if (min_starts > 0) opts.starts = min_starts;
      opts.seed = min_seed;
      opts.grad_tol = min_tol;
      opts.max_iters = min_iters;
      const auto r = rstab::minimize_configuration(min_n, dom, min_s, opts);
      if (!min_csv.empty()) {
        std::ofstream f(min_csv, std::ios::binary);
        if (!f) throw UsageError("cannot write " + min_csv);
        rstab::io::write_configuration_csv(f, r.configuration);
      }
      emit(rstab::io::to_json(r, dom, min_s, min_seed), format, out_path);
      return 0;
    }

    if (*const_cmd) {
      emit(rstab::io::constants_json(c_d, c_s, c_radius, c_lambda, c_phi0), format, out_path);
      return 0;
    }

    if (*cert_cmd) {
      const auto p = rstab::io::load_potential(cert_potential);
      rstab::CertifyBudget budget;
      budget.n_max = cert_nmax;
      if (cert_starts > 0) budget.minimizer.starts = cert_starts;
      budget.minimizer.seed = cert_seed;
      std::optional<double> eps;
      if (cert_eps > 0.0) eps = cert_eps;
      if (cert_eps < 0.0) throw UsageError("--epsilon must be >= 0");
      const auto cert = rstab::certify(p, cert_lambdas, eps, budget);
      emit(rstab::io::to_json(cert), format, out_path);
      switch (cert.classification) {
        case rstab::Classification::Unknown: return kExitUnknown;
        case rstab::Classification::Unstable: return kExitUnstable;
        default: return 0;
      }
    }

    if (*ver_cmd) {
      const auto p = rstab::io::load_potential(ver_potential);
      const auto cert = rstab::io::certificate_from_json(read_json_file(ver_cert));
      const auto report = rstab::empirical_bound_test(p, cert, ver_opts);
      emit(rstab::io::to_json(report, ver_opts), format, out_path);
      return report.violations == 0 ? 0 : kExitCounterexample;
    }

    if (*scan_cmd) {
      std::ostringstream csv;
      const auto grid = geometric_grid(scan_from, scan_to, scan_steps);
      if (scan_over == "lambda") {
        if (scan_potential.empty()) throw UsageError("scan --over lambda needs --potential");
        const auto p = rstab::io::load_potential(scan_potential);
        const auto& a = p.assumption();
        csv << "lambda,lhs,rhs,holds,v0,v0_remainder,negative_mass_over_lambda_d\n";
        const double mass = rstab::necessary_conditions(p).negative_mass;
        for (const double lambda : grid) {
          if (!(lambda > 0.0)) throw UsageError("lambda grid values must be > 0");
          const auto chk = rstab::check_SS_condition(p, lambda);
          csv << cell(lambda) << ',' << cell(chk.lhs) << ',' << cell(chk.rhs) << ',' << (chk.holds ? "true" : "false")
              << ',' << cell(chk.v0.value) << ',' << cell(chk.v0.remainder) << ','
              << cell(mass / std::pow(lambda, a.dimension)) << '\n';
        }
      } else {
        csv << "s,regime,I_s_ball,I_s_ball_equilibrium,C_d,C_sd,zeta_limit\n";
        const double nan = std::nan("");
        for (const double s : grid) {
          const auto regime = rstab::classify_regime(scan_d, s);
          const bool sub = s < scan_d;
          csv << cell(s) << ',' << rstab::to_string(regime) << ','
              << cell(sub ? rstab::energy_integral_ball(scan_d, s, 1.0) : nan) << ','
              << cell(sub ? rstab::equilibrium_energy_ball(scan_d, s, 1.0) : nan) << ','
              << cell(s == scan_d ? rstab::constant_Cd(scan_d, scan_lambda, scan_phi0) : nan) << ','
              << cell(s > scan_d ? rstab::constant_Csd(scan_d, s, scan_lambda, scan_phi0) : nan) << ','
              << cell(scan_d == 1 && s > 1.0 ? rstab::d1_zeta_limit(s) : nan) << '\n';
        }
      }
      if (out_path.empty() || out_path == "-") {
        std::cout << csv.str();
      } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw UsageError("cannot write " + out_path);
        f << csv.str();
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "riesz-stab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const rstab::ConfigError& e) {
    std::cerr << "riesz-stab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "riesz-stab: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
