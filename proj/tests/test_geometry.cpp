#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "rstab/error.hpp"
#include "rstab/geometry.hpp"
#include "rstab/kernels.hpp"
#include "support.hpp"

using namespace rstab;
using testsupport::Gen;
using testsupport::ulps;

namespace {

AssumptionA plain_meta(int d) {
  AssumptionA a;
  a.dimension = d;
  a.core_exponent = 1.0;
  a.core_strength = 1.0;
  a.core_radius = 1.0;
  a.tail_radius = 2.0;
  a.tail_strength = 1.0;
  a.tail_exponent = 1.0;
  return a;
}

PairPotential inverse_power(int d, double s) {
  return PairPotential("inverse", [s](double r) { return std::pow(r, -s); }, plain_meta(d));
}

// A potential with both signs and finite range for cell-list comparisons.
PairPotential ranged(int d) {
  return PairPotential(
      "ranged", [](double r) { return r >= 1.3 ? 0.0 : (1.0 / (r * r) - 1.5) * (1.3 - r); }, plain_meta(d), 1.3);
}

Configuration cfg(int d, std::vector<double> c) { return Configuration(d, std::move(c)); }

}  // namespace

TEST_CASE("cell_index examples") {
  CHECK(cell_index(std::vector<double>{0.0, 0.0}, CubicPartition(2, 1.0)) == CellIndex{0, 0});
  CHECK(cell_index(std::vector<double>{0.5}, CubicPartition(1, 1.0)) == CellIndex{1});
  CHECK(cell_index(std::vector<double>{-0.5}, CubicPartition(1, 1.0)) == CellIndex{0});
  CHECK(cell_index(std::vector<double>{-1.5, 2.49}, CubicPartition(2, 1.0)) == CellIndex{-1, 2});
}

TEST_CASE("cell_index satisfies the defining inequalities") {
  Gen gen(3);
  for (int t = 0; t < 5000; ++t) {
    const int d = gen.integer(1, 3);
    const double lam = gen.uniform(0.05, 3.0);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (auto& c : x) {
      // Mix generic points with exact cell faces.
      c = gen.integer(0, 3) == 0 ? lam * (gen.integer(-20, 20) + 0.5) : gen.uniform(-30.0, 30.0);
    }
    const auto r = cell_index(x, CubicPartition(d, lam));
    for (int k = 0; k < d; ++k) {
      CHECK(lam * (static_cast<double>(r[k]) - 0.5) <= x[k]);
      CHECK(x[k] < lam * (static_cast<double>(r[k]) + 0.5));
    }
  }
}

TEST_CASE("occupancy examples and invariants") {
  const CubicPartition part(1, 1.0);
  auto occ = occupancy(cfg(1, {0.1, 0.2}), part);
  REQUIRE(occ.cells.size() == 1);
  CHECK(occ.cells.at({0}).size() == 2);

  occ = occupancy(cfg(1, {0.1, 1.1}), part);
  CHECK(occ.cells.size() == 2);
  CHECK(occ.cells.at({0}).size() == 1);
  CHECK(occ.cells.at({1}).size() == 1);

  CHECK(occupancy(Configuration(1), part).cells.empty());

  Gen gen(5);
  for (int t = 0; t < 50; ++t) {
    const auto g = gen.configuration(static_cast<std::size_t>(gen.integer(0, 60)), 2, 3.0);
    const auto o = occupancy(g, CubicPartition(2, 0.7));
    CHECK(o.total() == g.size());
    std::vector<int> seen(g.size(), 0);
    for (const auto& [cell, members] : o.cells) {
      CHECK(std::is_sorted(members.begin(), members.end()));
      for (const auto i : members) {
        ++seen[i];
        CHECK(cell_index(g.point(i), CubicPartition(2, 0.7)) == cell);
      }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("total_energy examples") {
  CHECK(total_energy(cfg(1, {0.0, 1.0}), inverse_power(1, 2.0)) == 1.0);
  CHECK(total_energy(cfg(1, {0.3}), inverse_power(1, 2.0)) == 0.0);
  CHECK(total_energy(cfg(1, {0.0, 1.0, 2.0}), inverse_power(1, 1.0)) == 2.5);
}

TEST_CASE("total_energy names the coincident pair in input order") {
  const auto g = cfg(2, {5.0, 5.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0});
  try {
    (void)total_energy(g, inverse_power(2, 1.0));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("indices 1 and 3") != std::string::npos);
  }
}

TEST_CASE("total_energy against a long double oracle") {
  Gen gen(9);
  for (int t = 0; t < 100; ++t) {
    const int d = gen.integer(1, 3);
    const auto g = gen.configuration(static_cast<std::size_t>(gen.integer(2, 50)), d, 2.0);
    const auto p = inverse_power(d, 1.5);
    const double oracle = static_cast<double>(testsupport::oracle_riesz(g, 1.5));
    CHECK(testsupport::rel_diff(total_energy(g, p), oracle) < 1e-14);
  }
}

TEST_CASE("total_energy is exactly permutation invariant") {
  Gen gen(13);
  for (int t = 0; t < 30; ++t) {
    const int d = gen.integer(1, 3);
    const auto g = gen.configuration(static_cast<std::size_t>(gen.integer(2, 80)), d, 2.0);
    std::vector<std::size_t> perm(g.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), gen.engine());
    Configuration h(d);
    for (const auto i : perm) h.push_back(g.point(i));
    const auto p = ranged(d);
    CHECK(total_energy(g, p) == total_energy(h, p));
  }
}

TEST_CASE("cell-list path is bitwise equal to the direct path") {
  Gen gen(17);
  for (int t = 0; t < 20; ++t) {
    const int d = gen.integer(1, 3);
    const auto g = gen.configuration(static_cast<std::size_t>(gen.integer(64, 400)), d, 3.0).sorted();
    const auto p = ranged(d);
    CHECK(pair_energy_cell_list(g, p, 1.3) == pair_energy_direct(g, p));
  }
}

TEST_CASE("energy_decomposition example") {
  const auto g = cfg(2, {0.0, 0.0, 0.0, 0.2, 1.0, 0.0, 1.0, 0.2});
  const auto dec = energy_decomposition(g, inverse_power(2, 1.0), CubicPartition(2, 1.0));
  REQUIRE(dec.intra.size() == 2);
  for (const auto& [cell, u] : dec.intra) CHECK(u == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(dec.inter == doctest::Approx(2.0 + 2.0 / std::sqrt(1.04)).epsilon(1e-15));
}

TEST_CASE("energy_decomposition edge cases") {
  const auto p = inverse_power(2, 1.0);
  const auto one_cell = cfg(2, {0.1, 0.1, -0.2, 0.3, 0.0, -0.4});
  auto dec = energy_decomposition(one_cell, p, CubicPartition(2, 1.0));
  CHECK(dec.inter == 0.0);
  REQUIRE(dec.intra.size() == 1);
  CHECK(ulps(dec.intra_total(), total_energy(one_cell, p)) <= 8);

  const auto split = cfg(2, {0.0, 0.0, 3.0, 4.0});
  dec = energy_decomposition(split, p, CubicPartition(2, 1.0));
  CHECK(dec.intra.empty());
  CHECK(dec.inter == doctest::Approx(0.2));
}

TEST_CASE("decomposition identity on random configurations") {
  Gen gen(19);
  for (int t = 0; t < 300; ++t) {
    const int d = gen.integer(1, 3);
    const double lam = std::array<double, 3>{0.5, 1.0, 2.0}[static_cast<std::size_t>(gen.integer(0, 2))];
    const auto g = gen.configuration(static_cast<std::size_t>(gen.integer(2, 40)), d, 2.5);
    const auto p = ranged(d);
    const auto dec = energy_decomposition(g, p, CubicPartition(d, lam));
    const double total = total_energy(g, p);
    // Tolerance is 8 ulp of the absolute pair sum, the scale of the rounding.
    const double ulp = std::nextafter(dec.abs_scale, INFINITY) - dec.abs_scale;
    CHECK(std::abs(dec.intra_total() + dec.inter - total) <= 8 * ulp);
  }
}

TEST_CASE("translation by lattice vectors shifts cells and keeps energies") {
  // Dyadic coordinates and ribs make the shift exact in floating point.
  Gen gen(23);
  for (int t = 0; t < 40; ++t) {
    const int d = gen.integer(1, 3);
    const double lam = std::array<double, 3>{0.5, 1.0, 2.0}[static_cast<std::size_t>(gen.integer(0, 2))];
    auto g = gen.configuration(static_cast<std::size_t>(gen.integer(2, 30)), d, 2.0);
    std::vector<double> base(g.coordinates().begin(), g.coordinates().end());
    for (auto& c : base) c = std::round(c * 0x1p20) * 0x1p-20;
    g = Configuration(d, base);
    std::vector<std::int64_t> k(static_cast<std::size_t>(d));
    for (auto& c : k) c = gen.integer(-3, 3);
    std::vector<double> shifted = base;
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (int a = 0; a < d; ++a) shifted[i * d + a] += lam * static_cast<double>(k[a]);
    }
    const Configuration h(d, shifted);
    const CubicPartition part(d, lam);
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto ci = cell_index(g.point(i), part);
      for (int a = 0; a < d; ++a) ci[a] += k[a];
      CHECK(cell_index(h.point(i), part) == ci);
    }
    const auto p = ranged(d);
    CHECK(ulps(total_energy(g, p), total_energy(h, p)) <= 4);
    CHECK(ulps(energy_decomposition(g, p, part).inter, energy_decomposition(h, p, part).inter) <= 4);
  }
}

TEST_CASE("max_pair_distance examples") {
  CHECK(max_pair_distance(cfg(1, {0.0, 3.0})) == 3.0);
  CHECK(max_pair_distance(cfg(2, {0, 0, 1, 0, 0, 1, 1, 1})) == doctest::Approx(std::sqrt(2.0)));
  CHECK(max_pair_distance(cfg(1, {0.0, 1.0, 5.0})) == 5.0);
  CHECK_THROWS_AS(max_pair_distance(cfg(1, {0.0})), DomainError);
}

TEST_CASE("random_configuration examples") {
  CHECK(random_configuration(0, Box{2, 1.0, {}}, 1).empty());
  CHECK(random_configuration(50, Box{3, 2.0, {}}, 9) == random_configuration(50, Box{3, 2.0, {}}, 9));
  CHECK_FALSE(random_configuration(50, Box{3, 2.0, {}}, 9) == random_configuration(50, Box{3, 2.0, {}}, 10));
  const auto g = random_configuration(1000, Box{2, 1.0, {}}, 42);
  CHECK(g.size() == 1000);
  for (const double c : g.coordinates()) {
    CHECK(c >= -0.5);
    CHECK(c < 0.5);
  }
  CHECK(min_pair_distance(g) >= 1e-12);
}

TEST_CASE("serial and omp kernels agree") {
  Gen gen(29);
  for (int t = 0; t < 20; ++t) {
    const int d = gen.integer(1, 3);
    const auto g = gen.configuration(static_cast<std::size_t>(gen.integer(2, 600)), d, 2.0);
    const double s = gen.uniform(0.5, 4.0);
    std::vector<double> ga(g.coordinates().size()), gb(g.coordinates().size());
    const auto a = kernels::serial::riesz(g.coordinates(), d, s, ga);
    const auto b = kernels::omp::riesz(g.coordinates(), d, s, gb);
    CHECK(testsupport::rel_diff(a.energy, b.energy) < 1e-13);
    CHECK(a.min_distance == b.min_distance);
    for (std::size_t i = 0; i < ga.size(); ++i) CHECK(std::abs(ga[i] - gb[i]) <= 1e-9 * (std::abs(ga[i]) + 1.0));
    const auto f = [](double r) { return std::exp(-r) - 0.1; };
    CHECK(testsupport::rel_diff(kernels::serial::pair_sum(g.coordinates(), d, f).value,
                                kernels::omp::pair_sum(g.coordinates(), d, f).value) < 1e-12);
  }
}
