#include "rstab/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>

#include "rstab/error.hpp"
#include "rstab/special.hpp"

namespace rstab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kIntervalSamples = 33;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// |Phi^-(r)|, with r = 0 read as the limit from above.
double negative_part(const PairPotential& p, double r, double floor_r) {
  const double v = p(std::max(r, floor_r));
  if (std::isnan(v)) throw EvaluationError("potential is NaN at r = " + fmt(r), r);
  return v < 0.0 ? -v : 0.0;
}

// Bound on sum over cells with max-norm index m > T of sup |Phi^-|. Those
// cells are at distance >= lambda (m - 1) >= lambda T >= R from the
// reference cell, where |Phi^-(r)| <= phi1 r^{-(d+eps)}. Shell m holds
// (2m+1)^d - (2m-1)^d cells; with n = m - 1 the count is a polynomial in n
// and the shell sum is a combination of Hurwitz zeta values.
double far_cells_bound(const PairPotential& p, double lambda, int T) {
  const AssumptionA& a = p.assumption();
  if (p.range() && *p.range() < lambda * T) return 0.0;
  const int d = a.dimension;
  const double e = a.tail_exponent;
  double sum = 0.0;
  double binom = 1.0;  // C(d, j)
  for (int j = 0; j < d; ++j) {
    const double c = binom * std::pow(2.0, j) * (std::pow(3.0, d - j) - 1.0);
    sum += c * special::hurwitz_zeta(d + e - j, static_cast<double>(T));
    binom = binom * (d - j) / (j + 1);
  }
  return a.tail_strength * std::pow(lambda, -(d + e)) * sum;
}

int min_truncation(const PairPotential& p, double lambda) {
  return static_cast<int>(std::ceil(p.assumption().tail_radius / lambda)) + 1;
}

// Visits every integer vector in [lo, hi]^d in lexicographic order.
template <class F>
void for_each_index(int d, int lo, int hi, F&& f) {
  std::vector<int> k(static_cast<std::size_t>(d), lo);
  while (true) {
    f(k);
    int axis = d - 1;
    while (axis >= 0 && k[axis] == hi) k[axis--] = lo;
    if (axis < 0) return;
    ++k[axis];
  }
}

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

void add(StabilityCertificate& c, std::string name, double value, bool holds, std::string note = {}) {
  c.evidence.push_back({std::move(name), value, holds, std::move(note)});
}

std::string lambda_tag(double lambda) { return "lambda=" + fmt(lambda); }

}  // namespace

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Unstable: return "Unstable";
    case Classification::Unknown: return "Unknown";
    case Classification::S: return "S";
    case Classification::SS: return "SS";
    case Classification::SSS: return "SSS";
  }
  return "Unknown";
}

Classification classification_from_string(const std::string& name) {
  for (auto c : {Classification::Unstable, Classification::Unknown, Classification::S, Classification::SS,
                 Classification::SSS}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("unknown classification '" + name + "'");
}

V0 compute_v0(const PairPotential& p, double lambda, int truncation_cells, int subgrid) {
  if (!(lambda > 0.0)) throw DomainError("compute_v0: lambda must be > 0");
  if (subgrid < 2) throw ConfigError("compute_v0: subgrid must be >= 2");
  const int T = truncation_cells;
  if (T < min_truncation(p, lambda)) {
    throw ConfigError("compute_v0: truncation_cells must be >= ceil(R/lambda) + 1 = " +
                      std::to_string(min_truncation(p, lambda)));
  }
  const int d = p.dimension();
  const double floor_r = 1e-12 * lambda;
  std::vector<double> offsets(static_cast<std::size_t>(subgrid));
  for (int j = 0; j < subgrid; ++j) offsets[j] = lambda * (-0.5 + static_cast<double>(j) / (subgrid - 1));

  std::vector<std::vector<double>> local;  // sub-grid of a cell, relative to its centre
  for_each_index(d, 0, subgrid - 1, [&](const std::vector<int>& j) {
    std::vector<double> u(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) u[k] = offsets[j[k]];
    local.push_back(std::move(u));
  });

  double best = 0.0;
  std::vector<double> y(static_cast<std::size_t>(d));
  for (const auto& x : local) {
    double total = 0.0;
    for_each_index(d, -T, T, [&](const std::vector<int>& cell) {
      // Nearest point of the closed cell, and a quick reject by range.
      double near2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double c = lambda * cell[k];
        y[k] = std::clamp(x[k], c - 0.5 * lambda, c + 0.5 * lambda);
        near2 += (x[k] - y[k]) * (x[k] - y[k]);
      }
      if (p.range() && std::sqrt(near2) > *p.range()) return;
      double sup = negative_part(p, std::sqrt(near2), floor_r);
      for (const auto& u : local) {
        double r2 = 0.0;
        for (int k = 0; k < d; ++k) {
          const double diff = x[k] - (lambda * cell[k] + u[k]);
          r2 += diff * diff;
        }
        sup = std::max(sup, negative_part(p, std::sqrt(r2), floor_r));
      }
      total += sup;
    });
    best = std::max(best, total);
  }
  return {best, far_cells_bound(p, lambda, T)};
}

V0 cell_interaction_bound(const PairPotential& p, double lambda, int truncation_cells) {
  if (!(lambda > 0.0)) throw DomainError("cell_interaction_bound: lambda must be > 0");
  const int d = p.dimension();
  const double big_r = p.assumption().tail_radius;
  int T = truncation_cells;
  if (T == 0) {
    const int cap = static_cast<int>(std::floor(std::pow(4e6, 1.0 / d))) - 1;
    T = std::max(min_truncation(p, lambda), std::min(static_cast<int>(std::ceil(4.0 * big_r / lambda)) + 1, cap));
  }
  if (T < min_truncation(p, lambda)) {
    throw ConfigError("cell_interaction_bound: truncation_cells must be >= ceil(R/lambda) + 1");
  }
  const double floor_r = 1e-12 * lambda;
  // w(k) depends only on |k_i|; enumerate k >= 0 and weight by 2^{#nonzero}.
  double total = 0.0;
  for_each_index(d, 0, T, [&](const std::vector<int>& k) {
    int nonzero = 0;
    double lo2 = 0.0;
    double hi2 = 0.0;
    for (const int ki : k) {
      if (ki != 0) ++nonzero;
      const double gap = std::max(ki - 1, 0);
      lo2 += gap * gap;
      hi2 += (ki + 1.0) * (ki + 1.0);
    }
    if (nonzero == 0) return;
    const double lo = lambda * std::sqrt(lo2);
    const double hi = lambda * std::sqrt(hi2);
    if (p.range() && lo > *p.range()) return;
    double sup = 0.0;
    for (int j = 0; j <= kIntervalSamples + 1; ++j) {
      const double r = lo + (hi - lo) * j / (kIntervalSamples + 1);
      sup = std::max(sup, negative_part(p, r, floor_r));
    }
    total += ipow(2.0, nonzero) * sup;
  });
  return {total, far_cells_bound(p, lambda, T)};
}

double cell_energy_integral_lower_bound(int d, double s, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("cell_energy_integral_lower_bound: lambda must be > 0");
  const double radius = 0.5 * std::sqrt(static_cast<double>(d)) * lambda;
  return std::min(energy_integral_ball(d, s, radius), equilibrium_energy_ball(d, s, radius));
}

SSCheck check_SS_condition(const PairPotential& p, double lambda) {
  const AssumptionA& a = p.assumption();
  if (a.core_exponent >= a.dimension) {
    throw DomainError("check_SS_condition: requires s < d (use the s >= d theorems)");
  }
  SSCheck out;
  out.lambda = lambda;
  out.v0 = cell_interaction_bound(p, lambda);
  out.lhs = a.core_strength * cell_energy_integral_lower_bound(a.dimension, a.core_exponent, lambda);
  out.rhs = 0.5 * out.v0.value + out.v0.remainder;
  out.holds = out.lhs > out.rhs;
  return out;
}

BConstants compute_B_theorem1(const PairPotential& p, double lambda, double eps,
                              const std::vector<std::pair<std::size_t, double>>& e_values, double v0) {
  const AssumptionA& a = p.assumption();
  if (!(eps > 0.0)) throw DomainError("compute_B_theorem1: eps must be > 0");
  if (e_values.empty() || e_values.front().first != 2) {
    throw DomainError("compute_B_theorem1: e_values must start at N = 2");
  }
  const double I = cell_energy_integral_lower_bound(a.dimension, a.core_exponent, lambda);
  const double e2 = e_values.front().second;
  for (const auto& [n, e] : e_values) {
    if (I - e <= eps + 1e-12 * std::abs(I)) {
      const double gap_term = a.core_strength * (e - e2) * static_cast<double>(n);
      return {n, std::max(gap_term, 0.5 * v0)};
    }
  }
  throw DomainError("compute_B_theorem1: threshold I - e^(N) <= eps not reached by N = " +
                    std::to_string(e_values.back().first) + "; increase N_max or eps");
}

BConstants compute_B_theorem2(int d, double lambda, double phi0, double eps, double v0) {
  const double cd = constant_Cd(d, lambda, phi0);
  if (!(eps > 0.0) || !(eps < cd)) throw DomainError("compute_B_theorem2: requires 0 < eps < C_d = " + fmt(cd));
  if (!(v0 >= 0.0)) throw DomainError("compute_B_theorem2: v0 must be >= 0");
  const double k = cd - eps;
  if (0.5 * v0 / k > std::log(1e7)) {
    throw DomainError("compute_B_theorem2: N0 exceeds 1e7; eps is too close to C_d = " + fmt(cd));
  }
  std::size_t n0 = 2;
  while (!(k * std::log(static_cast<double>(n0)) > 0.5 * v0)) ++n0;
  double b = 0.5 * v0;
  for (std::size_t i = 2; i < n0; ++i) b += k * static_cast<double>(i) * std::log(static_cast<double>(i));
  return {n0, b};
}

std::vector<double> default_lambda_grid(const PairPotential& p, int steps) {
  std::vector<double> grid;
  double lambda = p.assumption().core_radius / std::sqrt(static_cast<double>(p.dimension()));
  for (int i = 0; i < steps; ++i, lambda *= 0.5) grid.push_back(lambda);
  return grid;
}

StabilityCertificate certify(const PairPotential& p, std::vector<double> lambda_grid, std::optional<double> epsilon,
                             const CertifyBudget& budget) {
  const AssumptionA& a = p.assumption();
  const int d = a.dimension;
  const double s = a.core_exponent;
  const double phi0 = a.core_strength;
  StabilityCertificate c;
  c.regime = classify_regime(d, s);
  if (epsilon && !(*epsilon > 0.0)) throw ConfigError("certify: epsilon must be > 0");

  // Necessary conditions.
  try {
    const auto nc = necessary_conditions(p);
    add(c, "bounded_below", nc.infimum, nc.bounded_below, "minimum of Phi on a log grid, at r = " + fmt(nc.infimum_radius));
    add(c, "dobrushin_integral", nc.integral, nc.integral_nonneg,
        nc.positive_part_divergent ? "integral of Phi over R^d diverges to +inf"
                                   : "integral of Phi over R^d, quadrature error " + fmt(nc.integral_error));
    add(c, "negative_mass", nc.negative_mass, true, "integral of |Phi^-| over R^d; small-lambda estimate of C, diagnostic only");
    if (!nc.bounded_below || !nc.integral_nonneg) {
      c.classification = Classification::Unstable;
      return c;
    }
  } catch (const QuadratureError& e) {
    add(c, "dobrushin_integral", e.partial_estimate(), false, e.what());
    c.classification = Classification::Unknown;
    return c;
  }

  const auto va = validate_assumption_A(p);
  add(c, "assumption_A", va.violating_radius.value_or(kNaN), va.passed,
      va.passed ? va.note : va.note + "; " + va.violated_condition + " bound violated");
  if (!va.passed) {
    c.classification = Classification::Unknown;
    return c;
  }

  if (lambda_grid.empty()) lambda_grid = default_lambda_grid(p);
  std::sort(lambda_grid.begin(), lambda_grid.end(), std::greater<>());
  const double lambda_max = a.core_radius / std::sqrt(static_cast<double>(d));
  std::vector<double> usable;
  for (const double lambda : lambda_grid) {
    if (!(lambda > 0.0)) throw ConfigError("certify: lambda values must be > 0");
    if (lambda > lambda_max * (1.0 + 1e-12)) {
      add(c, lambda_tag(lambda) + ":cell_inside_core", lambda, false,
          "cell diameter sqrt(d) lambda exceeds core_radius; skipped");
    } else {
      usable.push_back(lambda);
    }
  }

  const auto certify_with = [&](Classification cls, double A, double B, double pw, double lambda, V0 v0) {
    c.classification = cls;
    c.A = A;
    c.B = B;
    c.p = pw;
    c.lambda = lambda;
    c.v0 = v0;
  };

  if (c.regime == Regime::Hypersingular) {
    const double pw = 1.0 + s / d;
    for (const double lambda : usable) {
      const V0 w = cell_interaction_bound(p, lambda);
      const double csd = constant_Csd(d, s, lambda, phi0);
      const double A = csd - 0.5 * w.total() * std::pow(2.0, 1.0 - s / d);
      add(c, lambda_tag(lambda) + ":A", A, A > 0.0,
          "C_sd = " + fmt(csd) + ", v0 = " + fmt(w.value) + " + " + fmt(w.remainder));
      c.lambda = lambda;
      c.v0 = w;
      if (A > 0.0) {
        certify_with(Classification::SSS, A, 0.5 * w.total(), pw, lambda, w);
        return c;
      }
    }
    c.classification = Classification::Unknown;
    return c;
  }

  if (c.regime == Regime::Critical) {
    for (const double lambda : usable) {
      const V0 w = cell_interaction_bound(p, lambda);
      const double cd = constant_Cd(d, lambda, phi0);
      const double eps = epsilon.value_or(0.1 * cd);
      c.lambda = lambda;
      c.v0 = w;
      if (!(eps < cd)) {
        add(c, lambda_tag(lambda) + ":epsilon_below_C_d", eps, false, "C_d = " + fmt(cd));
        continue;
      }
      const auto b = compute_B_theorem2(d, lambda, phi0, eps, w.total());
      const double A = (cd - eps) * std::log(static_cast<double>(b.N0)) - 0.5 * w.total();
      add(c, lambda_tag(lambda) + ":A", A, A > 0.0,
          "C_d = " + fmt(cd) + "; relies on the asymptotic E ~ C_d N^2 ln N for the cell");
      if (A > 0.0) {
        certify_with(Classification::SS, A, b.B, 2.0, lambda, w);
        c.epsilon = eps;
        c.N0 = b.N0;
        return c;
      }
    }
    c.classification = Classification::Unknown;
    return c;
  }

  // 0 <= s < d.
  for (const double lambda : usable) {
    const SSCheck chk = check_SS_condition(p, lambda);
    add(c, lambda_tag(lambda) + ":ss_condition", chk.lhs - chk.rhs, chk.holds,
        "lhs = " + fmt(chk.lhs) + ", rhs = " + fmt(chk.rhs));
    c.lambda = lambda;
    c.v0 = chk.v0;
    if (!chk.holds) continue;
    const double margin = chk.lhs - chk.rhs;

    if (s == 0.0) {
      // Exact cell minima: U(gamma_Delta) >= phi0 n(n-1)/2.
      certify_with(Classification::SS, margin, std::max(0.5 * phi0, chk.rhs), 2.0, lambda, chk.v0);
      c.epsilon = 0.0;
      c.N0 = 2;
      add(c, "cell_minimum_exact", 0.5 * phi0, true, "minimal cell energy phi0 n(n-1)/2 for s = 0");
      return c;
    }

    const double I = cell_energy_integral_lower_bound(d, s, lambda);
    const double eps = epsilon.value_or(std::min(0.1 * I, 0.5 * margin / phi0));
    const double A = margin - phi0 * eps;
    if (!(A > 0.0)) {
      add(c, lambda_tag(lambda) + ":A", A, false, "epsilon too large for the margin");
      continue;
    }
    std::vector<std::pair<std::size_t, double>> e_values;
    const Domain cell = Domain::cube(d, lambda);
    for (std::size_t n = 2; n <= budget.n_max; ++n) {
      const double e = minimize_configuration(n, cell, s, budget.minimizer).normalized;
      e_values.emplace_back(n, e);
      if (I - e <= eps + 1e-12 * std::abs(I)) break;
    }
    for (const auto& [n, e] : e_values) add(c, "e_value:N=" + std::to_string(n), e, true, "best found by the minimizer");
    try {
      const auto b = compute_B_theorem1(p, lambda, eps, e_values, 2.0 * chk.rhs);
      certify_with(Classification::SS, A, b.B, 2.0, lambda, chk.v0);
      c.epsilon = eps;
      c.N0 = b.N0;
      add(c, "e_values_not_rigorous", static_cast<double>(b.N0), false,
          "N0 and B use minimizer energies, which are upper bounds of the minima");
    } catch (const DomainError& e) {
      add(c, "budget_exhausted", static_cast<double>(budget.n_max), false, e.what());
      c.classification = Classification::Unknown;
      c.epsilon = eps;
    }
    return c;
  }
  c.classification = Classification::Unknown;
  return c;
}

double ginibre_constants(double A, double lambda, int d) {
  if (!(A >= 0.0)) throw DomainError("ginibre_constants: A must be >= 0");
  if (!(lambda > 0.0)) throw DomainError("ginibre_constants: lambda must be > 0");
  return A * std::pow(lambda, d);
}

double certified_lower_bound(const Configuration& gamma, const StabilityCertificate& cert) {
  const auto occ = occupancy(gamma, CubicPartition(gamma.dimension(), cert.lambda));
  double rhs = 0.0;
  for (const auto& [cell, members] : occ.cells) {
    if (members.size() >= 2) rhs += cert.A * std::pow(static_cast<double>(members.size()), cert.p);
  }
  return rhs - cert.B * static_cast<double>(gamma.size());
}

FalsificationReport empirical_bound_test(const PairPotential& p, const StabilityCertificate& cert,
                                         const SamplerOptions& opts) {
  if (cert.classification != Classification::S && cert.classification != Classification::SS &&
      cert.classification != Classification::SSS) {
    throw ConfigError("empirical_bound_test: certificate is " + to_string(cert.classification) +
                      ", nothing to test");
  }
  if (!(cert.lambda > 0.0)) throw ConfigError("empirical_bound_test: certificate lambda must be > 0");
  if (opts.n_max < 2) throw ConfigError("empirical_bound_test: n_max must be >= 2");
  FalsificationReport report;
  report.trials = opts.trials;
  if (opts.trials == 0) return report;

  const int d = p.dimension();
  const Box box{d, opts.box_rib, {}};
  std::vector<double> slack(opts.trials);
  std::vector<char> violated(opts.trials, 0);
  std::vector<std::exception_ptr> errors(opts.trials);
  const auto nt = static_cast<std::ptrdiff_t>(opts.trials);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t t = 0; t < nt; ++t) {
    try {
      std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(t));
      const std::size_t n = 2 + static_cast<std::size_t>(rng() % (opts.n_max - 1));
      const Configuration gamma = random_configuration(n, box, rng());
      const double u = total_energy(gamma, p);
      const double rhs = certified_lower_bound(gamma, cert);
      slack[t] = u - rhs;
      violated[t] = slack[t] < -1e-9 * (std::abs(u) + std::abs(rhs) + 1.0);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (std::size_t t = 0; t < opts.trials; ++t) {
    if (!report.min_slack || slack[t] < *report.min_slack) {
      report.min_slack = slack[t];
      report.worst_trial = t;
    }
    if (violated[t]) {
      ++report.violations;
      if (!report.first_violation_trial) report.first_violation_trial = t;
    }
  }
  if (report.first_violation_trial) {
    std::mt19937_64 rng(opts.seed + *report.first_violation_trial);
    const std::size_t n = 2 + static_cast<std::size_t>(rng() % (opts.n_max - 1));
    report.counterexample = random_configuration(n, box, rng());
  }
  return report;
}

}  // namespace rstab
