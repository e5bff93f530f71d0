#pragma once

#include <span>
#include <string>

#include "rstab/geometry.hpp"

namespace rstab {

/// Where minimal-energy configurations live for a given (d, s).
enum class Regime {
  Flat,           // s = 0: energy is the pair count
  Boundary,       // 0 < s <= d - 2: equilibrium measure on the sphere
  Interior,       // d - 2 < s < d: equilibrium density on the whole ball
  Critical,       // s = d
  Hypersingular,  // s > d
};

Regime classify_regime(int d, double s);
std::string to_string(Regime r);

/// Sum over pairs of |x - y|^{-s}. For s = 0 returns the exact pair count.
/// Lexicographic point order, so the value does not depend on input order.
/// Throws DomainError on coincident points.
double riesz_energy(const Configuration& gamma, double s);

/// E / N^2; throws DomainError for N < 2.
double normalized_energy(double energy, std::size_t n);

/// Energy integral of the minimizing measure on the ball of radius r, as the
/// closed forms are usually written:
///   s <= d-2:      r^{-s} 2^{d-s-3} G((d-s-1)/2) G(d/2) / (sqrt(pi) G(d-1-s/2))
///   d-2 < s < d:   r^{-s} G(1+s/2) G((d-s)/2) / (2 G(1+d/2))
///   s = 0:         1/2
/// Throws DomainError for s >= d, where the integral is infinite.
///
/// The interior branch is smaller than half the equilibrium energy by the
/// factor 2/d (see equilibrium_energy_ball). For d = 3 that makes it
/// discontinuous with the boundary branch at s = 1.
double energy_integral_ball(int d, double s, double r);

/// Half the Riesz energy of the ball's equilibrium measure, computed from its
/// potential at the centre. Agrees with energy_integral_ball for s <= d-2 and
/// for d = 2; differs by the factor d/2 on the interior branch otherwise.
double equilibrium_energy_ball(int d, double s, double r);

struct MinimizingMeasure {
  enum class Kind { SurfaceUniform, Density };
  Kind kind;
  double radius;
  double surface_measure = 0.0;  // m(S^{d-1}(0, r)) for SurfaceUniform
  double density = 0.0;          // Lebesgue density at x for Density
};

/// Minimizing measure of the energy integral on the ball, at the point x.
/// Surface-uniform for s <= d-2; otherwise the density
/// A(d,s) / (r^2 - |x|^2)^{(d-s)/2} with A(d,s) = G(1+s/2) / (pi^{d/2} G(1-(d-s)/2)).
/// Throws DomainError for s >= d or |x| > r.
MinimizingMeasure minimizing_density_ball(int d, double s, double r, std::span<const double> x);

double interior_density_constant(int d, double s);

/// Leading constant for s = d: phi0 pi^{d/2} / (lambda^d d G(d/2)).
double constant_Cd(int d, double lambda, double phi0);

/// Lower-bound constant for s > d: phi0 lambda^{-s} 2^{-2s-1} (2 pi^{d/2} / (d G(d/2)))^{s/d}.
double constant_Csd(int d, double s, double lambda, double phi0);

/// constant_Csd * N^{1+s/d}: a lower bound on the Riesz s-energy (times phi0)
/// of any N points in a cube of rib lambda, s > d.
double hypersingular_lower_bound(int d, double s, double lambda, double phi0, std::size_t n);

/// lim E / N^{1+s} for minimal configurations on the unit interval, which is zeta(s).
double d1_zeta_limit(double s);

/// energy_integral_ball at the circumscribed radius sqrt(d) lambda / 2 of
/// the cube of rib lambda.
double cube_energy_integral_lower_bound(int d, double s, double lambda);

}  // namespace rstab
