#include "rstab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "rstab/error.hpp"
#include "rstab/kernels.hpp"

namespace rstab {
namespace {

std::vector<std::size_t> lexicographic_order(const Configuration& gamma) {
  std::vector<std::size_t> order(gamma.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto pa = gamma.point(a);
    const auto pb = gamma.point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  });
  return order;
}

Configuration permuted(const Configuration& gamma, const std::vector<std::size_t>& order) {
  std::vector<double> coords;
  coords.reserve(gamma.coordinates().size());
  for (const auto i : order) {
    const auto p = gamma.point(i);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return Configuration(gamma.dimension(), std::move(coords));
}

[[noreturn]] void throw_coincident(std::size_t i, std::size_t j) {
  throw DomainError("coincident points at indices " + std::to_string(i) + " and " + std::to_string(j));
}

}  // namespace

Configuration::Configuration(int dimension) : dim_(dimension) {
  if (dimension < 1) throw DomainError("configuration dimension must be >= 1");
}

Configuration::Configuration(int dimension, std::vector<double> coordinates)
    : dim_(dimension), coords_(std::move(coordinates)) {
  if (dimension < 1) throw DomainError("configuration dimension must be >= 1");
  if (coords_.size() % static_cast<std::size_t>(dimension) != 0) {
    throw DomainError("coordinate count is not a multiple of the dimension");
  }
}

void Configuration::push_back(std::span<const double> p) {
  if (p.size() != static_cast<std::size_t>(dim_)) throw DomainError("point has wrong dimension");
  coords_.insert(coords_.end(), p.begin(), p.end());
}

Configuration Configuration::sorted() const { return permuted(*this, lexicographic_order(*this)); }

CubicPartition::CubicPartition(int dimension_, double rib_) : dimension(dimension_), rib(rib_) {
  if (dimension < 1) throw DomainError("partition dimension must be >= 1");
  if (!(rib > 0.0) || !std::isfinite(rib)) throw DomainError("partition rib must be positive and finite");
}

CellIndex cell_index(std::span<const double> x, const CubicPartition& part) {
  CellIndex r(x.size());
  const double lam = part.rib;
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto k = static_cast<std::int64_t>(std::floor(x[i] / lam + 0.5));
    // Settle the guess against the inequality itself so the half-open
    // convention is exact in floating point.
    while (lam * (static_cast<double>(k) - 0.5) > x[i]) --k;
    while (x[i] >= lam * (static_cast<double>(k) + 0.5)) ++k;
    r[i] = k;
  }
  return r;
}

std::size_t CellOccupancy::total() const {
  std::size_t n = 0;
  for (const auto& [cell, members] : cells) n += members.size();
  return n;
}

Configuration CellOccupancy::sub_configuration(const Configuration& gamma, const CellIndex& cell) const {
  Configuration out(gamma.dimension());
  const auto it = cells.find(cell);
  if (it == cells.end()) return out;
  for (const auto i : it->second) out.push_back(gamma.point(i));
  return out;
}

CellOccupancy occupancy(const Configuration& gamma, const CubicPartition& part) {
  if (gamma.dimension() != part.dimension) throw DomainError("occupancy: dimension mismatch");
  CellOccupancy occ;
  for (std::size_t i = 0; i < gamma.size(); ++i) occ.cells[cell_index(gamma.point(i), part)].push_back(i);
  return occ;
}

double pair_energy_direct(const Configuration& gamma, const PairPotential& p) {
  const auto sum = kernels::omp::pair_sum(gamma.coordinates(), gamma.dimension(), [&](double r) { return p(r); });
  if (sum.coincident) throw_coincident(sum.coincident->first, sum.coincident->second);
  return sum.value;
}

double pair_energy_cell_list(const Configuration& gamma, const PairPotential& p, double cutoff) {
  if (!(cutoff > 0.0)) throw DomainError("cell list cutoff must be > 0");
  const int d = gamma.dimension();
  const std::size_t n = gamma.size();
  const auto x = gamma.coordinates();

  // Bin by floor(x / cutoff); any pair within the cutoff lies in adjacent bins.
  std::map<CellIndex, std::vector<std::size_t>> bins;
  std::vector<CellIndex> bin_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    CellIndex b(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) b[k] = static_cast<std::int64_t>(std::floor(x[i * d + k] / cutoff));
    bins[b].push_back(i);
    bin_of[i] = std::move(b);
  }
  std::vector<CellIndex> offsets;
  {
    const auto total = static_cast<std::size_t>(std::pow(3, d));
    for (std::size_t code = 0; code < total; ++code) {
      CellIndex off(static_cast<std::size_t>(d));
      std::size_t c = code;
      for (int k = 0; k < d; ++k) {
        off[k] = static_cast<std::int64_t>(c % 3) - 1;
        c /= 3;
      }
      offsets.push_back(std::move(off));
    }
  }

  // Rows i, neighbours j > i in increasing order: the same terms in the same
  // order as the direct path, minus exact zeros beyond the cutoff.
  std::vector<double> row(n, 0.0);
  std::vector<std::size_t> bad(n, n);
  const auto ni = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16) if (n >= kernels::kParallelThreshold && !kernels::in_parallel())
  for (std::ptrdiff_t ii = 0; ii < ni; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    std::vector<std::size_t> neighbours;
    CellIndex probe(static_cast<std::size_t>(d));
    for (const auto& off : offsets) {
      for (int k = 0; k < d; ++k) probe[k] = bin_of[i][k] + off[k];
      const auto it = bins.find(probe);
      if (it == bins.end()) continue;
      for (const auto j : it->second) {
        if (j > i) neighbours.push_back(j);
      }
    }
    std::sort(neighbours.begin(), neighbours.end());
    kernels::CompensatedSum acc;
    for (const auto j : neighbours) {
      const double r2 = kernels::squared_distance(&x[i * d], &x[j * d], d);
      if (r2 == 0.0) {
        if (bad[i] == n) bad[i] = j;
        continue;
      }
      const double r = std::sqrt(r2);
      if (r > cutoff) continue;
      acc.add(p(r));
    }
    row[i] = acc.value();
  }
  kernels::CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) {
    if (bad[i] != n) throw_coincident(i, bad[i]);
    total.add(row[i]);
  }
  return total.value();
}

double total_energy(const Configuration& gamma, const PairPotential& p) {
  if (gamma.size() < 2) return 0.0;
  const auto order = lexicographic_order(gamma);
  const Configuration sorted = permuted(gamma, order);
  try {
    if (p.range() && gamma.size() >= 64) return pair_energy_cell_list(sorted, p, *p.range());
    return pair_energy_direct(sorted, p);
  } catch (const DomainError&) {
    // Report the coincident pair in the caller's indexing.
    const auto sum = kernels::serial::pair_sum(sorted.coordinates(), sorted.dimension(), [](double) { return 0.0; });
    if (sum.coincident) {
      auto [a, b] = std::minmax(order[sum.coincident->first], order[sum.coincident->second]);
      throw_coincident(a, b);
    }
    throw;
  }
}

double EnergyDecomposition::intra_total() const {
  kernels::CompensatedSum acc;
  for (const auto& [cell, u] : intra) acc.add(u);
  return acc.value();
}

EnergyDecomposition energy_decomposition(const Configuration& gamma, const PairPotential& p,
                                         const CubicPartition& part) {
  if (gamma.dimension() != part.dimension) throw DomainError("energy_decomposition: dimension mismatch");
  const auto order = lexicographic_order(gamma);
  const Configuration sorted = permuted(gamma, order);
  const int d = sorted.dimension();
  const std::size_t n = sorted.size();
  const auto x = sorted.coordinates();

  const CellOccupancy occ = occupancy(sorted, part);
  std::vector<const CellIndex*> cell_of(n);
  for (const auto& [cell, members] : occ.cells) {
    for (const auto i : members) cell_of[i] = &cell;
  }
  std::map<CellIndex, kernels::CompensatedSum> intra;
  kernels::CompensatedSum inter;
  kernels::CompensatedSum scale;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r2 = kernels::squared_distance(&x[i * d], &x[j * d], d);
      if (r2 == 0.0) {
        auto [a, b] = std::minmax(order[i], order[j]);
        throw_coincident(a, b);
      }
      const double v = p(std::sqrt(r2));
      scale.add(std::abs(v));
      if (*cell_of[i] == *cell_of[j]) {
        intra[*cell_of[i]].add(v);
      } else {
        inter.add(v);
      }
    }
  }
  EnergyDecomposition out;
  for (const auto& [cell, members] : occ.cells) {
    if (members.size() >= 2) out.intra[cell] = intra[cell].value();
  }
  out.inter = inter.value();
  out.abs_scale = scale.value();
  return out;
}

double max_pair_distance(const Configuration& gamma) {
  if (gamma.size() < 2) throw DomainError("max_pair_distance: need at least two points");
  const int d = gamma.dimension();
  const auto x = gamma.coordinates();
  double best = 0.0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    for (std::size_t j = i + 1; j < gamma.size(); ++j) best = std::max(best, kernels::squared_distance(&x[i * d], &x[j * d], d));
  }
  return std::sqrt(best);
}

double min_pair_distance(const Configuration& gamma) {
  if (gamma.size() < 2) throw DomainError("min_pair_distance: need at least two points");
  const int d = gamma.dimension();
  const auto x = gamma.coordinates();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    for (std::size_t j = i + 1; j < gamma.size(); ++j) best = std::min(best, kernels::squared_distance(&x[i * d], &x[j * d], d));
  }
  return std::sqrt(best);
}

Configuration random_configuration(std::size_t n, const Box& box, std::uint64_t seed) {
  if (box.dimension < 1) throw DomainError("random_configuration: dimension must be >= 1");
  if (!(box.rib > 0.0)) throw DomainError("random_configuration: box rib must be > 0");
  if (!box.center.empty() && box.center.size() != static_cast<std::size_t>(box.dimension)) {
    throw DomainError("random_configuration: center has wrong dimension");
  }
  const int d = box.dimension;
  std::mt19937_64 rng(seed);
  const double min_sep2 = (1e-12 * box.rib) * (1e-12 * box.rib);
  std::vector<double> coords;
  coords.reserve(n * static_cast<std::size_t>(d));
  std::vector<double> p(static_cast<std::size_t>(d));
  while (coords.size() < n * static_cast<std::size_t>(d)) {
    for (int k = 0; k < d; ++k) {
      const double c = box.center.empty() ? 0.0 : box.center[k];
      p[k] = c + box.rib * (unit_uniform(rng) - 0.5);
    }
    bool ok = true;
    for (std::size_t j = 0; j < coords.size(); j += d) {
      if (kernels::squared_distance(&coords[j], p.data(), d) < min_sep2) {
        ok = false;
        break;
      }
    }
    if (ok) coords.insert(coords.end(), p.begin(), p.end());
  }
  return Configuration(d, std::move(coords));
}

}  // namespace rstab
