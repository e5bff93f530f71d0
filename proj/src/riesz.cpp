#include "rstab/riesz.hpp"

#include <cmath>
#include <numbers>

#include "rstab/error.hpp"
#include "rstab/kernels.hpp"
#include "rstab/special.hpp"

namespace rstab {
namespace {

using special::gamma;
constexpr double kPi = std::numbers::pi;

void require_subcritical(int d, double s, const char* who) {
  if (d < 1) throw DomainError(std::string(who) + ": d must be >= 1");
  if (!(s >= 0.0)) throw DomainError(std::string(who) + ": s must be >= 0");
  if (s >= d) throw DomainError(std::string(who) + ": energy integral infinite for s >= d");
}

}  // namespace

Regime classify_regime(int d, double s) {
  if (d < 1) throw DomainError("classify_regime: d must be >= 1");
  if (!(s >= 0.0)) throw DomainError("classify_regime: s must be >= 0");
  if (s == 0.0) return Regime::Flat;
  if (s <= d - 2) return Regime::Boundary;
  if (s < d) return Regime::Interior;
  if (s == d) return Regime::Critical;
  return Regime::Hypersingular;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Flat: return "flat";
    case Regime::Boundary: return "boundary";
    case Regime::Interior: return "interior";
    case Regime::Critical: return "critical";
    case Regime::Hypersingular: return "hypersingular";
  }
  return "unknown";
}

double riesz_energy(const Configuration& gamma, double s) {
  if (!(s >= 0.0)) throw DomainError("riesz_energy: s must be >= 0");
  const std::size_t n = gamma.size();
  if (n < 2) return 0.0;
  const Configuration sorted = gamma.sorted();
  const auto eval = kernels::omp::riesz(sorted.coordinates(), sorted.dimension(), s);
  if (eval.coincident) throw DomainError("riesz_energy: coincident points");
  if (s == 0.0) return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return eval.energy;
}

double normalized_energy(double energy, std::size_t n) {
  if (n < 2) throw DomainError("normalized_energy: N must be >= 2");
  const auto nn = static_cast<double>(n);
  return energy / (nn * nn);
}

double energy_integral_ball(int d, double s, double r) {
  require_subcritical(d, s, "energy_integral_ball");
  if (!(r > 0.0)) throw DomainError("energy_integral_ball: r must be > 0");
  if (s == 0.0) return 0.5;
  const double scale = std::pow(r, -s);
  if (s <= d - 2) {
    return scale * std::pow(2.0, d - s - 3) * gamma(0.5 * (d - s - 1)) * gamma(0.5 * d) /
           (std::sqrt(kPi) * gamma(d - 1 - 0.5 * s));
  }
  return scale * gamma(1.0 + 0.5 * s) * gamma(0.5 * (d - s)) / (2.0 * gamma(1.0 + 0.5 * d));
}

double equilibrium_energy_ball(int d, double s, double r) {
  require_subcritical(d, s, "equilibrium_energy_ball");
  if (!(r > 0.0)) throw DomainError("equilibrium_energy_ball: r must be > 0");
  if (s == 0.0) return 0.5;
  const double scale = std::pow(r, -s);
  if (s <= d - 2) return energy_integral_ball(d, s, r);
  // The equilibrium potential is constant on the ball; its value at the
  // centre is A(d,s) |S^{d-1}| (1/2) B((d-s)/2, 1-(d-s)/2).
  return scale * gamma(1.0 + 0.5 * s) * gamma(0.5 * (d - s)) / (2.0 * gamma(0.5 * d));
}

double interior_density_constant(int d, double s) {
  return gamma(1.0 + 0.5 * s) / (std::pow(kPi, 0.5 * d) * gamma(1.0 - 0.5 * (d - s)));
}

MinimizingMeasure minimizing_density_ball(int d, double s, double r, std::span<const double> x) {
  require_subcritical(d, s, "minimizing_density_ball");
  if (!(r > 0.0)) throw DomainError("minimizing_density_ball: r must be > 0");
  if (x.size() != static_cast<std::size_t>(d)) throw DomainError("minimizing_density_ball: x has wrong dimension");
  double x2 = 0.0;
  for (const double c : x) x2 += c * c;
  if (x2 > r * r) throw DomainError("minimizing_density_ball: |x| > r");
  if (s <= d - 2) {
    return {MinimizingMeasure::Kind::SurfaceUniform, r, special::unit_sphere_area(d) * std::pow(r, d - 1), 0.0};
  }
  const double gap = r * r - x2;
  const double density = gap > 0.0 ? interior_density_constant(d, s) / std::pow(gap, 0.5 * (d - s))
                                   : std::numeric_limits<double>::infinity();
  return {MinimizingMeasure::Kind::Density, r, 0.0, density};
}

double constant_Cd(int d, double lambda, double phi0) {
  if (d < 1) throw DomainError("constant_Cd: d must be >= 1");
  if (!(lambda > 0.0) || !(phi0 > 0.0)) throw DomainError("constant_Cd: lambda and phi0 must be > 0");
  return phi0 * std::pow(kPi, 0.5 * d) / (std::pow(lambda, d) * d * gamma(0.5 * d));
}

double constant_Csd(int d, double s, double lambda, double phi0) {
  if (d < 1) throw DomainError("constant_Csd: d must be >= 1");
  if (!(s > d)) throw DomainError("constant_Csd: requires s > d");
  if (!(lambda > 0.0) || !(phi0 > 0.0)) throw DomainError("constant_Csd: lambda and phi0 must be > 0");
  const double ball_term = 2.0 * std::pow(kPi, 0.5 * d) / (d * gamma(0.5 * d));
  return phi0 * std::pow(lambda, -s) * std::pow(2.0, -2.0 * s - 1.0) * std::pow(ball_term, s / d);
}

double hypersingular_lower_bound(int d, double s, double lambda, double phi0, std::size_t n) {
  if (n < 2) throw DomainError("hypersingular_lower_bound: N must be >= 2");
  return constant_Csd(d, s, lambda, phi0) * std::pow(static_cast<double>(n), 1.0 + s / d);
}

double d1_zeta_limit(double s) {
  if (!(s > 1.0)) throw DomainError("d1_zeta_limit: requires s > 1");
  return special::zeta(s);
}

double cube_energy_integral_lower_bound(int d, double s, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("cube_energy_integral_lower_bound: lambda must be > 0");
  return energy_integral_ball(d, s, std::sqrt(static_cast<double>(d)) * lambda / 2.0);
}

}  // namespace rstab
