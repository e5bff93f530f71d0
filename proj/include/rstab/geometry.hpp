#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rstab/potentials.hpp"

namespace rstab {

/// A finite set of points in R^d, stored row-major (point i occupies
/// coordinates [i*d, (i+1)*d)).
class Configuration {
 public:
  explicit Configuration(int dimension);
  Configuration(int dimension, std::vector<double> coordinates);

  int dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / static_cast<std::size_t>(dim_); }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<const double> coordinates() const noexcept { return coords_; }

  void push_back(std::span<const double> p);

  /// Copy with points in lexicographic coordinate order.
  Configuration sorted() const;

  bool operator==(const Configuration&) const = default;

 private:
  int dim_;
  std::vector<double> coords_;
};

/// Half-open cubes of rib lambda centred at lambda * r, r in Z^d.
struct CubicPartition {
  int dimension;
  double rib;

  CubicPartition(int dimension, double rib);
};

using CellIndex = std::vector<std::int64_t>;

/// The unique r with rib (r_i - 1/2) <= x_i < rib (r_i + 1/2) for each i.
CellIndex cell_index(std::span<const double> x, const CubicPartition& part);

/// Occupied cells and the indices (into the source configuration) of their
/// points, in input order. Empty cells are not stored.
struct CellOccupancy {
  std::map<CellIndex, std::vector<std::size_t>> cells;

  std::size_t total() const;
  Configuration sub_configuration(const Configuration& gamma, const CellIndex& cell) const;
};

CellOccupancy occupancy(const Configuration& gamma, const CubicPartition& part);

/// U(gamma): sum of Phi over unordered pairs. Points are put in
/// lexicographic order first, which makes the result independent of input
/// order. Potentials with a finite range use a cell list for N >= 64 whose
/// result is bitwise equal to the direct sum. Throws DomainError naming the
/// first coincident pair.
double total_energy(const Configuration& gamma, const PairPotential& p);

// The two interaction paths behind total_energy, exposed for testing. The
// configuration is used as given (no sorting).
double pair_energy_direct(const Configuration& gamma, const PairPotential& p);
double pair_energy_cell_list(const Configuration& gamma, const PairPotential& p, double cutoff);

struct EnergyDecomposition {
  std::map<CellIndex, double> intra;  // U(gamma_Delta) for cells with >= 2 points
  double inter = 0.0;                 // pairs split across two cells
  double abs_scale = 0.0;             // sum of |Phi| over all pairs

  double intra_total() const;
};

EnergyDecomposition energy_decomposition(const Configuration& gamma, const PairPotential& p,
                                         const CubicPartition& part);

/// Throws DomainError for fewer than two points.
double max_pair_distance(const Configuration& gamma);

double min_pair_distance(const Configuration& gamma);

/// Axis-aligned cube of the given rib.
struct Box {
  int dimension;
  double rib;
  std::vector<double> center;  // empty means the origin
};

/// N points uniform in the box drawn from std::mt19937_64(seed). A draw
/// closer than 1e-12 * rib to an earlier point is redrawn.
Configuration random_configuration(std::size_t n, const Box& box, std::uint64_t seed);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw. Used
/// instead of std::uniform_real_distribution so sequences match across
/// standard libraries.
template <class Engine>
double unit_uniform(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace rstab
