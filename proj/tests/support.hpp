#pragma once

// Independent oracles and hand-rolled generators for the test suites. The
// oracles deliberately avoid the library's own code paths: std::tgamma and
// std::riemann_zeta for special functions, long double pair loops for
// energies, plain composite Simpson for radial integrals.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "rstab/geometry.hpp"

namespace testsupport {

inline constexpr double kPi = 3.14159265358979323846;

/// Units in the last place between a and b, measured at the larger magnitude.
inline double ulps(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  const double ulp = std::nextafter(scale, INFINITY) - scale;
  return std::abs(a - b) / ulp;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Energy integral on the ball, written from std::tgamma.
inline double oracle_boundary_integral(int d, double s, double r) {
  return std::pow(r, -s) * std::pow(2.0, d - s - 3) * std::tgamma((d - s - 1) / 2.0) * std::tgamma(d / 2.0) /
         (std::sqrt(kPi) * std::tgamma(d - 1 - s / 2.0));
}

// Half the energy of the equilibrium measure of the ball for d-2 < s < d:
// the potential is constant, so evaluate it at the centre by a 1-D radial
// integral of the density A / (1 - |x|^2)^{(d-s)/2} against |x|^{-s},
// computed with t = 1 - rho^2 substitution to tame the edge singularity.
inline double oracle_equilibrium_half_energy(int d, double s) {
  const double a = std::tgamma(1.0 + s / 2.0) / (std::pow(kPi, d / 2.0) * std::tgamma(1.0 - (d - s) / 2.0));
  const double area = 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0);
  // int_0^1 rho^{d-1-s} (1 - rho^2)^{-(d-s)/2} d rho = B((d-s)/2, 1 - (d-s)/2) / 2
  const double beta = std::tgamma((d - s) / 2.0) * std::tgamma(1.0 - (d - s) / 2.0) / std::tgamma(1.0);
  return 0.5 * a * area * 0.5 * beta;
}

/// Riesz s-energy by a long double double loop in input order.
inline long double oracle_riesz(const rstab::Configuration& g, double s) {
  long double e = 0.0L;
  const int d = g.dimension();
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      long double r2 = 0.0L;
      for (int k = 0; k < d; ++k) {
        const long double diff = static_cast<long double>(g.point(i)[k]) - g.point(j)[k];
        r2 += diff * diff;
      }
      e += std::pow(r2, -static_cast<long double>(s) / 2.0L);
    }
  }
  return e;
}

/// Sum of f(r) over pairs, long double.
inline long double oracle_pair_sum(const rstab::Configuration& g, const std::function<double(double)>& f) {
  long double e = 0.0L;
  const int d = g.dimension();
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      long double r2 = 0.0L;
      for (int k = 0; k < d; ++k) {
        const long double diff = static_cast<long double>(g.point(i)[k]) - g.point(j)[k];
        r2 += diff * diff;
      }
      e += f(static_cast<double>(std::sqrt(r2)));
    }
  }
  return e;
}

/// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

/// Hand-rolled generator: uniform doubles, integers and configurations from
/// a seeded mt19937_64.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * rstab::unit_uniform(rng_); }
  int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }

  rstab::Configuration configuration(std::size_t n, int d, double half_width) {
    std::vector<double> c(n * static_cast<std::size_t>(d));
    for (auto& x : c) x = uniform(-half_width, half_width);
    return rstab::Configuration(d, std::move(c));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testsupport
