#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rstab/geometry.hpp"

namespace rstab {

/// Cube of the given rib or ball of the given radius, centred at the origin.
class Domain {
 public:
  enum class Kind { Cube, Ball };

  static Domain cube(int dimension, double rib);
  static Domain ball(int dimension, double radius);

  Kind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return dim_; }
  double size() const noexcept { return size_; }  // rib or radius
  double diameter() const noexcept;

  /// Inside, allowing `slack` past the boundary.
  bool contains(std::span<const double> x, double slack = 1e-12) const;
  /// Euclidean projection of every point of a flat coordinate array.
  void project(std::span<double> coords) const;

  std::string describe() const;  // "cube:1" or "ball:1"

 private:
  Domain(Kind kind, int dimension, double size);
  Kind kind_;
  int dim_;
  double size_;
};

struct MinimizeOptions {
  std::optional<std::size_t> starts;  // default 8 + 2N
  int max_iters = 50000;
  double grad_tol = 1e-9;  // stop when |projected gradient| <= grad_tol * N
  std::uint64_t seed = 1;
};

struct MinimizationResult {
  Configuration configuration;  // lexicographically sorted
  double energy = 0.0;
  double normalized = 0.0;  // E / N^2, 0 for N < 2
  int iterations = 0;
  double gradient_norm = 0.0;
  std::size_t starts_attempted = 0;
  std::size_t best_start = 0;
  std::string label = "best found";
};

/// dE/dx_i = -s sum_{j != i} (x_i - x_j) / |x_i - x_j|^{s+2}, flat (N*d), in
/// input order. Throws DomainError on coincident points or s <= 0.
std::vector<double> riesz_gradient(const Configuration& gamma, double s);

/// Multistart projected gradient descent with Armijo backtracking. Start k
/// draws uniform points from std::mt19937_64(seed + k). Result is an upper
/// bound on the minimum: the lowest energy over all starts, ties within
/// 1e-12 going to the lexicographically smaller sorted configuration.
/// Independent of the number of threads.
MinimizationResult minimize_configuration(std::size_t n, const Domain& dom, double s,
                                          const MinimizeOptions& opts = {});

/// Exhaustive search over grid_per_axis^d grid points (endpoints included;
/// restricted to the ball for ball domains), then one local descent from the
/// best grid configuration. Requires N <= 4, grid_per_axis >= 8, d*N <= 8.
MinimizationResult brute_force_min(std::size_t n, const Domain& dom, double s, int grid_per_axis);

struct ESequence {
  std::vector<std::pair<std::size_t, double>> values;  // (N, e^(N))
  std::vector<std::size_t> decreases;                   // N where e dropped by more than the tolerance
  bool monotone() const noexcept { return decreases.empty(); }
};

/// e^(N) = E/N^2 for each N via minimize_configuration. For s = 0 the exact
/// value (1 - 1/N)/2 is returned without minimizing. Requires every N >= 2.
ESequence e_sequence(const Domain& dom, double s, const std::vector<std::size_t>& ns,
                     const MinimizeOptions& opts = {}, double tolerance = 1e-6);

/// Fractions of the points per bin. Balls: `bins` radial shells of equal
/// volume, innermost first. Cubes: bins^d congruent sub-cells, first axis
/// slowest. Points outside the domain are clamped to the nearest bin.
std::vector<double> spatial_histogram(const Configuration& gamma, const Domain& dom, int bins);

}  // namespace rstab
