#include "rstab/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "rstab/error.hpp"

namespace rstab::special {
namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Series factor A_g(z) for z = x - 1.
double lanczos_sum(double z) {
  double a = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + static_cast<double>(i));
  return a;
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

// B_{2k} / (2k)!, k = 1..7
constexpr std::array<double, 7> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0};

}  // namespace

double gamma(double x) {
  if (!std::isfinite(x)) throw DomainError("gamma: non-finite argument");
  if (is_nonpositive_integer(x)) throw DomainError("gamma: pole at " + std::to_string(x));
  if (x < 0.5) {
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma(1.0 - x));
  }
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  // t^{z+1/2} split in two halves so large arguments overflow only when the
  // result itself does.
  const double half = std::pow(t, 0.5 * (z + 0.5));
  return std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) * lanczos_sum(z);
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: requires x > 0");
  if (x < 0.5) return std::log(std::abs(gamma(x)));
  const double z = x - 1.0;
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(lanczos_sum(z));
}

double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0)) throw DomainError("hurwitz_zeta: requires s > 1");
  if (!(a > 0.0)) throw DomainError("hurwitz_zeta: requires a > 0");
  constexpr int kTerms = 16;
  double sum = 0.0;
  for (int n = kTerms - 1; n >= 0; --n) sum += std::pow(n + a, -s);
  const double x = kTerms + a;
  double tail = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  // Euler-Maclaurin: sum_k B_2k/(2k)! * s(s+1)...(s+2k-2) * x^{-s-2k+1}
  double rising = s;
  double power = std::pow(x, -s - 1.0);
  const double inv_x2 = 1.0 / (x * x);
  for (std::size_t k = 0; k < kBernoulliOverFactorial.size(); ++k) {
    tail += kBernoulliOverFactorial[k] * rising * power;
    const double m = 2.0 * static_cast<double>(k) + 1.0;
    rising *= (s + m) * (s + m + 1.0);
    power *= inv_x2;
  }
  return sum + tail;
}

double zeta(double s) {
  if (!(s > 1.0)) throw DomainError("zeta: requires s > 1");
  return hurwitz_zeta(s, 1.0);
}

double unit_sphere_area(int d) {
  if (d < 1) throw DomainError("unit_sphere_area: requires d >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / gamma(0.5 * d);
}

double unit_ball_volume(int d) {
  if (d < 1) throw DomainError("unit_ball_volume: requires d >= 1");
  return std::pow(std::numbers::pi, 0.5 * d) / gamma(1.0 + 0.5 * d);
}

}  // namespace rstab::special
