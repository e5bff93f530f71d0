#pragma once

namespace rstab::special {

/// Gamma function via the Lanczos approximation (g = 7, 9 terms) with the
/// reflection formula below 1/2. Relative accuracy is about 1e-15 on the
/// positive axis. Throws DomainError at the poles 0, -1, -2, ...
double gamma(double x);

/// log|Gamma(x)| for x > 0.
double log_gamma(double x);

/// Hurwitz zeta sum_{n>=0} (n + a)^{-s} for s > 1, a > 0. Direct partial
/// sum followed by an Euler-Maclaurin tail correction.
double hurwitz_zeta(double s, double a);

/// Riemann zeta for s > 1.
double zeta(double s);

/// Surface measure of the unit sphere S^{d-1} in R^d: 2 pi^{d/2} / Gamma(d/2).
double unit_sphere_area(int d);

/// Lebesgue volume of the unit ball in R^d: pi^{d/2} / Gamma(1 + d/2).
double unit_ball_volume(int d);

}  // namespace rstab::special
