#include "rstab/potentials.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "rstab/error.hpp"
#include "rstab/special.hpp"

namespace rstab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative slack on the sampled bound comparisons, so a potential that equals
// its own bound is not rejected on rounding.
constexpr double kBoundSlack = 1e-12;

std::string format_radius(double r) {
  std::ostringstream os;
  os.precision(17);
  os << r;
  return os.str();
}

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) grid[i] = lo * std::exp(step * i);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

struct Piece {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

// Integrates g over (0, 1] cut into `panels` equal panels.
template <class G>
Piece integrate_unit(G&& g, int panels) {
  using boost::math::quadrature::gauss_kronrod;
  using boost::math::quadrature::tanh_sinh;
  Piece out;
  const double width = 1.0 / panels;
  double l1_total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = k * width;
    const double b = (k + 1 == panels) ? 1.0 : (k + 1) * width;
    double err = 0.0;
    double l1 = 0.0;
    double v = 0.0;
    if (k == 0) {
      // u = 0 is where core and tail substitutions leave their singularities.
      bool ok = true;
      try {
        v = tanh_sinh<double>(12).integrate(g, a, b, 1e-12, &err, &l1);
      } catch (const std::exception&) {
        ok = false;
      }
      if (!ok || !(err <= 1e-8 * l1)) {
        // Kinks (tabulated potentials) suit Gauss-Kronrod better.
        double gk_err = 0.0;
        double gk_l1 = 0.0;
        const double gk = gauss_kronrod<double, 15>::integrate(g, a, b, 12, 1e-10, &gk_err, &gk_l1);
        if (!ok || gk_err < err) {
          v = gk;
          err = gk_err;
          l1 = gk_l1;
        }
      }
    } else {
      v = gauss_kronrod<double, 15>::integrate(g, a, b, 12, 1e-10, &err, &l1);
    }
    if (!std::isfinite(v) || !std::isfinite(err)) out.converged = false;
    out.value += v;
    out.error += std::isfinite(err) ? err : kInf;
    l1_total += l1;
  }
  // Judged on the whole piece: a singular endpoint panel may be loose on its own.
  if (!(out.error <= 1e-4 * l1_total + 1e-12)) out.converged = false;
  return out;
}

}  // namespace

void AssumptionA::check() const {
  if (dimension < 1) throw ConfigError("potential: dimension must be >= 1");
  if (!(core_exponent >= 0.0)) throw ConfigError("potential: core_exponent must be >= 0");
  if (!(core_strength > 0.0)) throw ConfigError("potential: core_strength must be > 0");
  if (!(core_radius > 0.0)) throw ConfigError("potential: core_radius must be > 0");
  if (!(tail_radius > core_radius)) throw ConfigError("potential: tail_radius must exceed core_radius");
  if (!(tail_strength > 0.0)) throw ConfigError("potential: tail_strength must be > 0");
  if (!(tail_exponent > 0.0)) throw ConfigError("potential: tail_exponent must be > 0");
  if (!std::isfinite(core_exponent) || !std::isfinite(core_strength) || !std::isfinite(tail_radius) ||
      !std::isfinite(tail_strength) || !std::isfinite(tail_exponent)) {
    throw ConfigError("potential: metadata must be finite");
  }
}

PairPotential::PairPotential(std::string kind, Function phi, AssumptionA meta,
                             std::optional<double> range, std::map<std::string, double> parameters)
    : kind_(std::move(kind)),
      phi_(std::move(phi)),
      meta_(meta),
      range_(range),
      parameters_(std::move(parameters)) {
  meta_.check();
  if (!phi_) throw ConfigError("potential: empty evaluation function");
  if (range_ && !(*range_ > 0.0)) throw ConfigError("potential: range must be > 0");
}

double PairPotential::evaluate(double r) const {
  if (!(r > 0.0)) throw EvaluationError("potential evaluated at non-positive radius " + format_radius(r), r);
  const double v = phi_(r);
  if (!std::isfinite(v)) throw EvaluationError("potential is not finite at r = " + format_radius(r), r);
  return v;
}

PairPotential riesz_potential(const AssumptionA& meta) {
  meta.check();
  const double s = meta.core_exponent;
  const double phi0 = meta.core_strength;
  const double big_r = meta.tail_radius;
  const double phi1 = meta.tail_strength;
  const double tail_power = meta.dimension + meta.tail_exponent;
  auto phi = [=](double r) {
    double v = phi0 * std::pow(r, -s);
    if (r > big_r) v -= phi1 * std::pow(r, -tail_power);
    return v;
  };
  return PairPotential("riesz", phi, meta, std::nullopt, {});
}

PairPotential square_well(int dimension, double height, double core_radius, double depth,
                          double well_radius) {
  if (!(height > 0.0)) throw ConfigError("square_well: height must be > 0");
  if (!(core_radius > 0.0)) throw ConfigError("square_well: core_radius must be > 0");
  if (!(depth >= 0.0)) throw ConfigError("square_well: depth must be >= 0");
  if (depth > 0.0 && !(well_radius > core_radius)) {
    throw ConfigError("square_well: well_radius must exceed core_radius when depth > 0");
  }
  AssumptionA meta;
  meta.dimension = dimension;
  meta.core_exponent = 0.0;
  meta.core_strength = height;
  meta.core_radius = core_radius;
  meta.tail_exponent = 1.0;
  meta.tail_radius = depth > 0.0 ? well_radius : std::max(well_radius, 2.0 * core_radius);
  // At r = R the value is -depth, which must sit above -phi1 / R^{d+eps}.
  meta.tail_strength = depth > 0.0 ? depth * std::pow(meta.tail_radius, dimension + meta.tail_exponent) : 1.0;
  const double outer = depth > 0.0 ? well_radius : core_radius;
  auto phi = [=](double r) {
    if (r <= core_radius) return height;
    if (r <= outer) return -depth;
    return 0.0;
  };
  return PairPotential("square_well", phi, meta, outer,
                       {{"height", height},
                        {"core_radius", core_radius},
                        {"depth", depth},
                        {"well_radius", well_radius}});
}

PairPotential lj_like(int dimension, double exponent_m, double strength, double sigma, double cutoff) {
  if (!(exponent_m > 0.0)) throw ConfigError("lj_like: exponent must be > 0");
  if (!(strength > 0.0)) throw ConfigError("lj_like: strength must be > 0");
  if (!(sigma > 0.0)) throw ConfigError("lj_like: sigma must be > 0");
  if (!(cutoff > 0.5 * sigma)) throw ConfigError("lj_like: cutoff must exceed sigma/2");
  AssumptionA meta;
  meta.dimension = dimension;
  meta.core_exponent = 2.0 * exponent_m;
  meta.core_radius = 0.5 * sigma;
  // For r <= sigma/2: Phi = a sigma^{2m} r^{-2m} (1 - (r/sigma)^m) >= a sigma^{2m} (1 - 2^{-m}) r^{-2m}.
  meta.core_strength = strength * std::pow(sigma, 2.0 * exponent_m) * (1.0 - std::pow(2.0, -exponent_m));
  meta.tail_radius = cutoff;
  meta.tail_strength = 1.0;
  meta.tail_exponent = 1.0;
  auto phi = [=](double r) {
    if (r >= cutoff) return 0.0;
    const double q = std::pow(sigma / r, exponent_m);
    return strength * (q * q - q);
  };
  return PairPotential("lj_like", phi, meta, cutoff,
                       {{"lj_exponent", exponent_m},
                        {"lj_strength", strength},
                        {"lj_sigma", sigma},
                        {"cutoff", cutoff}});
}

PairPotential tabulated(std::vector<std::pair<double, double>> rows, const AssumptionA& meta) {
  if (rows.size() < 2) throw ConfigError("custom-table: need at least two rows");
  std::sort(rows.begin(), rows.end());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].first > 0.0) || !std::isfinite(rows[i].second)) {
      throw ConfigError("custom-table: radii must be > 0 and values finite");
    }
    if (i > 0 && rows[i].first == rows[i - 1].first) throw ConfigError("custom-table: duplicate radius");
  }
  const double s = meta.core_exponent;
  const double last = rows.back().first;
  auto phi = [rows = std::move(rows), s](double r) {
    const auto& [r0, v0] = rows.front();
    if (r < r0) return v0 * std::pow(r0 / r, s);
    if (r > rows.back().first) return 0.0;
    auto hi = std::lower_bound(rows.begin(), rows.end(), r,
                               [](const std::pair<double, double>& row, double x) { return row.first < x; });
    if (hi->first == r) return hi->second;
    const auto lo = hi - 1;
    const double t = (r - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
  };
  return PairPotential("custom-table", phi, meta, last, {});
}

SplitValue split_pos_neg(const PairPotential& p, double r) {
  const double v = p.evaluate(r);
  return {std::max(0.0, v), std::min(0.0, v)};
}

AssumptionReport validate_assumption_A(const PairPotential& p, int sample_count) {
  if (sample_count < 2) throw ConfigError("validate_assumption_A: sample_count must be >= 2");
  const AssumptionA& a = p.assumption();
  auto grid = log_grid(1e-3 * a.core_radius, 100.0 * a.tail_radius, sample_count);
  grid.push_back(a.core_radius);
  grid.push_back(a.tail_radius);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  AssumptionReport report;
  report.samples = static_cast<int>(grid.size());
  report.note = "sampled check on " + std::to_string(grid.size()) +
                " log-spaced radii; not a proof that the bounds hold for every radius";
  auto fail = [&](double r, const char* what) {
    report.passed = false;
    report.violating_radius = r;
    report.violated_condition = what;
  };
  const double tail_power = a.dimension + a.tail_exponent;
  for (const double r : grid) {
    const double v = p(r);
    if (!std::isfinite(v)) {
      fail(r, "finite");
      break;
    }
    if (r <= a.core_radius) {
      const double bound = a.core_strength * std::pow(r, -a.core_exponent);
      if (v < 0.0 || v < bound - kBoundSlack * bound) {
        fail(r, "core");
        break;
      }
    }
    if (r >= a.tail_radius) {
      const double bound = -a.tail_strength * std::pow(r, -tail_power);
      if (v < bound - kBoundSlack * std::abs(bound)) {
        fail(r, "tail");
        break;
      }
    }
  }
  return report;
}

NecessaryConditionsReport necessary_conditions(const PairPotential& p, int quadrature_points) {
  if (quadrature_points < 16) throw ConfigError("necessary_conditions: quadrature_points must be >= 16");
  const AssumptionA& a = p.assumption();
  const int d = a.dimension;
  NecessaryConditionsReport report;

  // Infimum on a log grid over (0, 100 R].
  {
    const auto grid = log_grid(1e-6 * a.core_radius, 100.0 * a.tail_radius, 64 * quadrature_points);
    report.infimum = kInf;
    for (const double r : grid) {
      const double v = p(r);
      if (std::isnan(v) || v == -kInf) {
        report.bounded_below = false;
        report.infimum = -kInf;
        report.infimum_radius = r;
        break;
      }
      if (v < report.infimum) {
        report.infimum = v;
        report.infimum_radius = r;
      }
    }
  }

  const double area = special::unit_sphere_area(d);
  const double lam = a.core_radius;
  const double big_r = a.tail_radius;
  const double s = a.core_exponent;
  auto radial = [&](double r, bool positive) {
    const double v = p(r);
    const double part = positive ? std::max(0.0, v) : std::min(0.0, v);
    return part == 0.0 ? 0.0 : part * std::pow(r, d - 1);
  };

  // Core piece: r = lam * u^q makes the bound phi0 r^{-s} r^{d-1} dr flat in u.
  const bool core_bound_holds = validate_assumption_A(p, 512).violated_condition != "core";
  const double q_core = s < d ? 1.0 / (d - s) : 1.0;
  auto core = [&](bool positive) {
    return integrate_unit(
        [&](double u) {
          if (u <= 0.0) return 0.0;
          const double r = lam * std::pow(u, q_core);
          const double v = radial(r, positive);
          return v == 0.0 ? 0.0 : v * lam * q_core * std::pow(u, q_core - 1.0);
        },
        quadrature_points);
  };
  // Middle piece, linear in r.
  auto middle = [&](bool positive) {
    return integrate_unit([&](double u) { return radial(lam + u * (big_r - lam), positive) * (big_r - lam); },
                          quadrature_points);
  };
  // Tail piece: r = R u^{-q}, q = 1/eps flattens the tail bound.
  const double q_tail = 1.0 / a.tail_exponent;
  auto tail = [&](bool positive) {
    return integrate_unit(
        [&](double u) {
          if (u <= 0.0) return 0.0;
          const double r = big_r * std::pow(u, -q_tail);
          if (!std::isfinite(r)) return 0.0;
          const double v = radial(r, positive);
          return v == 0.0 ? 0.0 : v * q_tail * big_r * std::pow(u, -q_tail - 1.0);
        },
        quadrature_points);
  };

  double negative = 0.0;
  double negative_err = 0.0;
  for (auto piece : {core(false), middle(false), tail(false)}) {
    if (!piece.converged) {
      throw QuadratureError("necessary_conditions: quadrature of the negative part did not converge",
                            area * (negative + piece.value), area * (negative_err + piece.error));
    }
    negative += piece.value;
    negative_err += piece.error;
  }

  double positive = 0.0;
  double positive_err = 0.0;
  if (s >= d && core_bound_holds) {
    report.core_divergent = true;
    report.positive_part_divergent = true;
  } else {
    for (auto piece : {core(true), middle(true), tail(true)}) {
      if (!piece.converged) {
        // Phi^+ >= 0: non-convergence is read as divergence to +inf. This can
        // only make the sign test pass, never fail.
        report.positive_part_divergent = true;
        break;
      }
      positive += piece.value;
      positive_err += piece.error;
    }
  }

  report.negative_mass = negative < 0.0 ? -area * negative : 0.0;
  if (report.positive_part_divergent) {
    report.integral = kInf;
    report.integral_error = area * negative_err;
  } else {
    report.integral = area * (positive + negative);
    report.integral_error = area * (positive_err + negative_err);
  }
  report.integral_nonneg = !(report.integral + report.integral_error < 0.0);
  return report;
}

}  // namespace rstab
