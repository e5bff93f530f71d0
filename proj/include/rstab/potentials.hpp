#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rstab {

/// Structural constants of a radial potential: a repulsive core bound
/// Phi(r) >= core_strength / r^core_exponent for r <= core_radius, and an
/// integrable attractive tail Phi(r) >= -tail_strength / r^{d + tail_exponent}
/// for r >= tail_radius.
struct AssumptionA {
  int dimension = 0;
  double core_exponent = 0.0;
  double core_strength = 0.0;
  double core_radius = 0.0;
  double tail_radius = 0.0;
  double tail_strength = 0.0;
  double tail_exponent = 0.0;

  /// Throws ConfigError unless d >= 1, s >= 0, strengths > 0, 0 < core_radius < tail_radius.
  void check() const;
};

/// Immutable radial 2-body interaction Phi(r), r > 0.
///
/// The evaluation function must be free of side effects; instances are
/// shared across threads without synchronization.
class PairPotential {
 public:
  using Function = std::function<double(double)>;

  /// `range`, when set, promises Phi(r) == 0 exactly for r > range.
  /// `parameters` records the constructor inputs for serialization.
  PairPotential(std::string kind, Function phi, AssumptionA meta,
                std::optional<double> range = std::nullopt,
                std::map<std::string, double> parameters = {});

  double operator()(double r) const { return phi_(r); }

  /// Phi(r), throwing EvaluationError for r <= 0 or a non-finite value.
  double evaluate(double r) const;

  const std::string& kind() const noexcept { return kind_; }
  const AssumptionA& assumption() const noexcept { return meta_; }
  int dimension() const noexcept { return meta_.dimension; }
  std::optional<double> range() const noexcept { return range_; }
  const std::map<std::string, double>& parameters() const noexcept { return parameters_; }

 private:
  std::string kind_;
  Function phi_;
  AssumptionA meta_;
  std::optional<double> range_;
  std::map<std::string, double> parameters_;
};

// Built-in families. Each one fills in Assumption (A) metadata that holds
// for its own formula.

/// phi0 / r^s - phi1 * [r > R] / r^{d + eps}; all constants taken from `meta`.
PairPotential riesz_potential(const AssumptionA& meta);

/// height on (0, core_radius], -depth on (core_radius, well_radius], 0 beyond.
/// Core exponent 0. With depth == 0 the well radius may equal the core radius.
PairPotential square_well(int dimension, double height, double core_radius, double depth,
                          double well_radius);

/// strength * ((sigma/r)^{2m} - (sigma/r)^m) for r < cutoff, 0 for r >= cutoff.
/// Core exponent 2m, core radius sigma/2.
PairPotential lj_like(int dimension, double exponent_m, double strength, double sigma,
                      double cutoff);

/// Linear interpolation through (r, Phi) samples sorted by r. Below the first
/// sample the core power law Phi(r0) (r0/r)^s continues the table; above the
/// last sample Phi is 0.
PairPotential tabulated(std::vector<std::pair<double, double>> rows, const AssumptionA& meta);

struct SplitValue {
  double positive = 0.0;  // max{0, Phi(r)}
  double negative = 0.0;  // min{0, Phi(r)}
};

SplitValue split_pos_neg(const PairPotential& p, double r);

struct AssumptionReport {
  bool passed = true;
  std::optional<double> violating_radius;
  std::string violated_condition;  // "core", "tail" or "finite"
  int samples = 0;
  std::string note;
};

/// Samples Phi on a log-spaced grid over [1e-3 core_radius, 100 tail_radius]
/// and checks the core bound (r <= core_radius), the tail bound
/// (r >= tail_radius) and finiteness everywhere. A sampled check, not a proof.
AssumptionReport validate_assumption_A(const PairPotential& p, int sample_count = 4096);

struct NecessaryConditionsReport {
  bool bounded_below = true;
  double infimum = 0.0;
  double infimum_radius = 0.0;
  double integral = 0.0;        // integral of Phi(|x|) over R^d; may be +inf
  double integral_error = 0.0;  // absolute quadrature error estimate
  double negative_mass = 0.0;   // integral of |Phi^-(|x|)| over R^d
  bool core_divergent = false;
  bool positive_part_divergent = false;
  bool integral_nonneg = true;
};

/// Lower-boundedness of Phi and the sign of its space integral. Quadrature
/// runs separately on Phi^+ and Phi^- over (0, core_radius], [core_radius,
/// tail_radius], [tail_radius, inf), each cut into `quadrature_points`
/// panels of adaptive Gauss-Kronrod. A divergent positive part reports +inf.
NecessaryConditionsReport necessary_conditions(const PairPotential& p, int quadrature_points = 64);

}  // namespace rstab
