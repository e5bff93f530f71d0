#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rstab/certifier.hpp"
#include "rstab/error.hpp"
#include "support.hpp"

using namespace rstab;
using testsupport::Gen;
using testsupport::kPi;

namespace {

AssumptionA meta(int d, double s, double phi0, double lam, double big_r, double phi1, double eps) {
  AssumptionA a;
  a.dimension = d;
  a.core_exponent = s;
  a.core_strength = phi0;
  a.core_radius = lam;
  a.tail_radius = big_r;
  a.tail_strength = phi1;
  a.tail_exponent = eps;
  return a;
}

// 1/r^4 inside r <= 1, -r^{-3.5} beyond r > 2, d = 2.
PairPotential pure_core_sss() {
  auto a = meta(2, 4.0, 1.0, 1.0, 2.0, 1.0, 1.5);
  return PairPotential(
      "pure_core", [](double r) { return r <= 1.0 ? std::pow(r, -4.0) : (r > 2.0 ? -std::pow(r, -3.5) : 0.0); }, a);
}

PairPotential flat_step(int d, double h) { return square_well(d, h, 1.0, 0.0, 1.0); }

PairPotential negative_exponential() {
  return PairPotential("neg_exp", [](double r) { return -std::exp(-r); }, meta(3, 0.0, 1.0, 0.5, 1.0, 1.0, 1.0));
}

// -1 on r < 1.5, zero beyond; only the negative part matters for v0.
PairPotential minus_one_below(double cut) {
  return PairPotential("step", [cut](double r) { return r < cut ? -1.0 : 0.0; },
                       meta(1, 0.0, 1.0, 0.5, cut, 1.0, 1.0), cut);
}

}  // namespace

TEST_CASE("classification names round-trip") {
  for (auto c : {Classification::Unstable, Classification::Unknown, Classification::S, Classification::SS,
                 Classification::SSS}) {
    CHECK(classification_from_string(to_string(c)) == c);
  }
  CHECK_THROWS_AS(classification_from_string("stable"), ConfigError);
}

TEST_CASE("compute_v0 examples") {
  const auto zero = compute_v0(flat_step(2, 3.0), 0.5, 5);
  CHECK(zero.value == 0.0);
  CHECK(zero.remainder == 0.0);

  // Worst x is on a cell face, reaching four cells of the open interval (x - 1.5, x + 1.5).
  const auto v = compute_v0(minus_one_below(1.5), 1.0, 3);
  CHECK(v.value == 4.0);
  CHECK(v.remainder == 0.0);

  CHECK_THROWS_AS(compute_v0(minus_one_below(1.5), 1.0, 2), ConfigError);
}

TEST_CASE("compute_v0 is monotone in the truncation") {
  const auto p = pure_core_sss();
  V0 prev{0.0, INFINITY};
  for (int t : {3, 4, 6, 9}) {
    const auto v = compute_v0(p, 1.0, t, 3);
    CHECK(v.value >= prev.value);
    CHECK(v.remainder <= prev.remainder);
    prev = v;
  }
  V0 wprev{0.0, INFINITY};
  for (int t : {5, 8, 12, 40}) {
    const auto w = cell_interaction_bound(p, 0.5, t);
    CHECK(w.value >= wprev.value);
    CHECK(w.remainder <= wprev.remainder);
    wprev = w;
  }
}

TEST_CASE("cell_interaction_bound dominates compute_v0") {
  const auto p = square_well(2, 3.0, 1.0, 0.5, 1.8);
  for (double lam : {0.7, 0.35, 0.2}) {
    const int t = static_cast<int>(std::ceil(1.8 / lam)) + 1;
    CHECK(cell_interaction_bound(p, lam, t).value >= compute_v0(p, lam, t).value);
  }
}

TEST_CASE("check_SS_condition examples") {
  const auto ok = check_SS_condition(flat_step(2, 3.0), 1.0);
  CHECK(ok.lhs == 1.5);
  CHECK(ok.rhs == 0.0);
  CHECK(ok.holds);

  // Coulomb core with a deep attractive shell: v0 dwarfs the cell energy.
  const auto deep = PairPotential(
      "deep", [](double r) { return r <= 0.5 ? 1.0 / r : (r < 3.0 ? -50.0 : 0.0); }, meta(3, 1.0, 1.0, 0.5, 3.0, 1.0, 1.0),
      3.0);
  const auto no = check_SS_condition(deep, 0.25);
  CHECK(no.rhs > no.lhs);
  CHECK_FALSE(no.holds);

  CHECK_THROWS_AS(check_SS_condition(pure_core_sss(), 0.5), DomainError);
}

TEST_CASE("check_SS_condition over a descending lambda scan") {
  const auto p = square_well(3, 1.0, 1.0, 0.05, 1.5);
  double prev_lhs = 0.0;
  for (double lam = 0.5; lam > 0.05; lam *= 0.5) {
    const auto c = check_SS_condition(p, lam);
    CHECK(c.lhs >= prev_lhs);  // s = 0: lhs is flat, never decreasing
    prev_lhs = c.lhs;
    CHECK(c.rhs > 0.0);
  }
}

TEST_CASE("compute_B_theorem1 examples") {
  const auto flat = flat_step(2, 3.0);
  // eps >= I - e(2) = 0.5 - 0.25
  auto b = compute_B_theorem1(flat, 0.5, 0.3, {{2, 0.25}, {3, 1.0 / 3.0}}, 3.0);
  CHECK(b.N0 == 2);
  CHECK(b.B == 1.5);

  const auto riesz = riesz_potential(meta(3, 1.0, 2.0, 1.0, 1.5, 1.0, 1.0));
  const double lam = 0.5;
  const double I = cell_energy_integral_lower_bound(3, 1.0, lam);
  std::vector<std::pair<std::size_t, double>> e;
  for (std::size_t n = 2; n <= 20; ++n) e.emplace_back(n, I * (1.0 - 1.0 / static_cast<double>(n)));
  b = compute_B_theorem1(riesz, lam, 0.1 * I, e, 0.0);
  CHECK(b.N0 == 10);
  CHECK(b.B == doctest::Approx(2.0 * (e[8].second - e[0].second) * 10.0).epsilon(1e-14));
  b = compute_B_theorem1(riesz, lam, 0.1 * I, e, 1e6);
  CHECK(b.B == 5e5);

  CHECK_THROWS_WITH_AS(compute_B_theorem1(riesz, lam, 1e-9, e, 0.0), doctest::Contains("increase N_max or eps"),
                       DomainError);
  CHECK_THROWS_AS(compute_B_theorem1(riesz, lam, 0.1, {{3, 0.1}}, 0.0), DomainError);
}

TEST_CASE("compute_B_theorem2 examples") {
  auto b = compute_B_theorem2(2, 1.0, 1.0, 0.1, 0.0);
  CHECK(b.N0 == 2);
  CHECK(b.B == 0.0);

  b = compute_B_theorem2(2, 1.0, 1.0, 0.1, 4.0);
  CHECK(b.N0 == 4);
  const double k = kPi / 2 - 0.1;
  CHECK(b.B == doctest::Approx(2.0 + k * (2 * std::log(2.0) + 3 * std::log(3.0))).epsilon(1e-13));
  CHECK(std::abs(b.B - 8.886) < 1e-3);

  CHECK_THROWS_AS(compute_B_theorem2(2, 1.0, 1.0, constant_Cd(2, 1.0, 1.0), 4.0), DomainError);
  CHECK_THROWS_AS(compute_B_theorem2(2, 1.0, 1.0, constant_Cd(2, 1.0, 1.0) * (1 - 1e-15), 4.0), DomainError);
  CHECK_THROWS_AS(compute_B_theorem2(2, 1.0, 1.0, 0.0, 4.0), DomainError);
}

TEST_CASE("compute_B_theorem2 returns the least threshold") {
  Gen gen(83);
  for (int t = 0; t < 500; ++t) {
    const int d = gen.integer(1, 4);
    const double lam = gen.uniform(0.2, 2.0);
    const double phi0 = gen.uniform(0.1, 5.0);
    const double cd = constant_Cd(d, lam, phi0);
    const double eps = gen.uniform(0.01, 0.5) * cd;
    const double v0 = gen.uniform(0.0, 10.0) * cd;
    const auto b = compute_B_theorem2(d, lam, phi0, eps, v0);
    const double k = cd - eps;
    CHECK(k * std::log(static_cast<double>(b.N0)) > v0 / 2);
    if (b.N0 > 2) CHECK(k * std::log(static_cast<double>(b.N0 - 1)) <= v0 / 2);
  }
}

TEST_CASE("default lambda grid") {
  const auto g = default_lambda_grid(flat_step(2, 1.0));
  REQUIRE(g.size() == 8);
  CHECK(g[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] == g[i - 1] / 2);
}

TEST_CASE("certify: pure core with s > d is SSS") {
  const auto p = pure_core_sss();
  const auto c = certify(p);
  REQUIRE(c.classification == Classification::SSS);
  CHECK(c.p == 3.0);
  CHECK(c.A > 0.0);
  CHECK(c.B == 0.5 * c.v0.total());
  CHECK(c.regime == Regime::Hypersingular);
  CHECK(std::sqrt(2.0) * c.lambda <= 1.0);
  CHECK_FALSE(c.evidence.empty());

  // A N^p <= C_sd N^p - (v0/2) N^2 for N = 2..1000.
  const double csd = constant_Csd(2, 4.0, c.lambda, 1.0);
  for (int n = 2; n <= 1000; ++n) {
    const double np = std::pow(n, c.p);
    CHECK(c.A * np <= csd * np - 0.5 * c.v0.total() * n * static_cast<double>(n) + 1e-12 * csd * np);
  }

  SamplerOptions o;
  o.trials = 2000;
  const auto rep = empirical_bound_test(p, c, o);
  CHECK(rep.violations == 0);
  REQUIRE(rep.min_slack);
  CHECK(*rep.min_slack >= 0.0);
}

TEST_CASE("certify: flat step is SS with A = 1.5") {
  const auto p = flat_step(2, 3.0);
  const auto c = certify(p);
  REQUIRE(c.classification == Classification::SS);
  CHECK(c.A == 1.5);
  CHECK(c.p == 2.0);
  CHECK(c.v0.total() == 0.0);
  CHECK(c.lambda == doctest::Approx(1.0 / std::sqrt(2.0)));

  // With B = 0 the bound fails for two points in one cell: U = 3 < 1.5 * 4.
  const Configuration pair(2, {0.0, 0.0, 0.1, 0.0});
  StabilityCertificate zero_b = c;
  zero_b.B = 0.0;
  CHECK(total_energy(pair, p) < certified_lower_bound(pair, zero_b));
  CHECK(total_energy(pair, p) >= certified_lower_bound(pair, c));

  SamplerOptions o;
  o.trials = 2000;
  o.box_rib = 3.0;
  CHECK(empirical_bound_test(p, c, o).violations == 0);
}

TEST_CASE("certify: negative exponential is Unstable") {
  const auto c = certify(negative_exponential());
  CHECK(c.classification == Classification::Unstable);
  bool found = false;
  for (const auto& e : c.evidence) {
    if (e.name == "dobrushin_integral") {
      found = true;
      CHECK_FALSE(e.holds);
      CHECK(e.value == doctest::Approx(-8 * kPi).epsilon(1e-6));
    }
  }
  CHECK(found);
}

TEST_CASE("certify never calls a nonnegative potential Unstable") {
  Gen gen(89);
  for (int t = 0; t < 10; ++t) {
    const int d = gen.integer(1, 3);
    const auto c = certify(square_well(d, gen.uniform(0.1, 5.0), gen.uniform(0.3, 2.0), 0.0, 2.0));
    CHECK(c.classification != Classification::Unstable);
  }
  const auto r = riesz_potential(meta(2, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0));
  CHECK(certify(r).classification != Classification::Unstable);
}

TEST_CASE("certify: critical s = d") {
  const auto p = PairPotential("critical", [](double r) { return r <= 1.0 ? 1.0 / (r * r) : 0.0; },
                               meta(2, 2.0, 1.0, 1.0, 2.0, 1.0, 1.0), 1.0);
  const auto c = certify(p);
  CHECK(c.classification == Classification::SS);
  REQUIRE(c.N0);
  const double cd = constant_Cd(2, c.lambda, 1.0);
  CHECK(c.epsilon == doctest::Approx(0.1 * cd));
  CHECK(c.A > 0.0);
}

TEST_CASE("certify: skipped lambdas are recorded") {
  const auto c = certify(flat_step(2, 3.0), {1.0, 0.5});
  CHECK(c.classification == Classification::SS);
  CHECK(c.lambda == 0.5);
  CHECK(c.evidence.end() != std::find_if(c.evidence.begin(), c.evidence.end(), [](const Evidence& e) {
          return e.name.find("cell_inside_core") != std::string::npos;
        }));
}

TEST_CASE("ginibre_constants examples") {
  CHECK(ginibre_constants(1.0, 1.0, 3) == 1.0);
  CHECK(ginibre_constants(0.5, 2.0, 2) == 2.0);
  CHECK(ginibre_constants(0.0, 3.0, 2) == 0.0);
  CHECK_THROWS_AS(ginibre_constants(-1.0, 1.0, 2), DomainError);
}

TEST_CASE("empirical_bound_test edge cases") {
  const auto p = flat_step(2, 3.0);
  const auto c = certify(p);
  SamplerOptions o;
  o.trials = 0;
  const auto rep = empirical_bound_test(p, c, o);
  CHECK(rep.trials == 0);
  CHECK(rep.violations == 0);
  CHECK_FALSE(rep.min_slack);
  CHECK_FALSE(rep.counterexample);

  StabilityCertificate unknown;
  CHECK_THROWS_AS(empirical_bound_test(p, unknown), ConfigError);
}

TEST_CASE("empirical_bound_test catches an inflated certificate") {
  const auto p = square_well(1, 3.0, 1.0, 0.5, 1.5);
  auto c = certify(p);
  REQUIRE(c.classification == Classification::SS);
  CHECK(c.v0.total() > 0.0);

  SamplerOptions o;
  o.trials = 2000;
  o.box_rib = 2.0;
  CHECK(empirical_bound_test(p, c, o).violations == 0);

  c.A *= 10.0;
  const auto rep = empirical_bound_test(p, c, o);
  CHECK(rep.violations > 0);
  REQUIRE(rep.counterexample);
  CHECK(total_energy(*rep.counterexample, p) < certified_lower_bound(*rep.counterexample, c));
}

TEST_CASE("empirical_bound_test is deterministic") {
  const auto p = square_well(1, 3.0, 1.0, 0.5, 1.5);
  const auto c = certify(p);
  SamplerOptions o;
  o.trials = 300;
  const auto a = empirical_bound_test(p, c, o);
  const auto b = empirical_bound_test(p, c, o);
  CHECK(a.min_slack == b.min_slack);
  CHECK(a.worst_trial == b.worst_trial);
}
