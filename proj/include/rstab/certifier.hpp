#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rstab/geometry.hpp"
#include "rstab/minimizer.hpp"
#include "rstab/potentials.hpp"
#include "rstab/riesz.hpp"

namespace rstab {

enum class Classification { Unstable, Unknown, S, SS, SSS };

std::string to_string(Classification c);
Classification classification_from_string(const std::string& name);

struct Evidence {
  std::string name;
  double value = 0.0;  // NaN when there is no meaningful number
  bool holds = false;
  std::string note;
};

/// A cell-sum of |Phi^-| split into the sampled part and an analytic bound on
/// the cells beyond the truncation.
struct V0 {
  double value = 0.0;
  double remainder = 0.0;
  double total() const noexcept { return value + remainder; }
};

struct StabilityCertificate {
  Classification classification = Classification::Unknown;
  double A = 0.0;
  double B = 0.0;
  double p = 2.0;
  double lambda = 0.0;
  V0 v0;
  Regime regime = Regime::Flat;
  double epsilon = 0.0;
  std::optional<std::size_t> N0;
  std::vector<Evidence> evidence;
};

/// sup_x sum_Delta sup_{y in Delta} |Phi^-(|x - y|)| over cells within
/// truncation_cells (max-norm of the cell index). The outer sup runs over a
/// subgrid^d grid of the reference cell (faces included); each inner sup over
/// a subgrid^d grid of the cell plus the cell point nearest x. Cells further
/// out are bounded through the tail bound, summed over lattice shells in
/// closed form. Requires truncation_cells >= ceil(R / lambda) + 1.
V0 compute_v0(const PairPotential& p, double lambda, int truncation_cells, int subgrid = 5);

/// sum_{k != 0} sup { |Phi^-(r)| : dist(Delta_0, Delta_k) <= r <= diam(Delta_0 u Delta_k) },
/// the per-cell constant W in  sum over split pairs of Phi >= -(W/2) sum_Delta |gamma_Delta|^2.
/// Each interval sup is sampled at 33 points plus the endpoints. The far
/// cells are bounded as in compute_v0. truncation_cells = 0 picks a default
/// of about 4R/lambda, capped for large d.
V0 cell_interaction_bound(const PairPotential& p, double lambda, int truncation_cells = 0);

/// Lower bound for the minimal energy integral of a cube of rib lambda: the
/// ball closed form at the circumscribed radius, taking the smaller of
/// energy_integral_ball and equilibrium_energy_ball.
double cell_energy_integral_lower_bound(int d, double s, double lambda);

struct SSCheck {
  double lambda = 0.0;
  double lhs = 0.0;  // phi0 * cell_energy_integral_lower_bound
  double rhs = 0.0;  // W / 2 + remainder
  V0 v0;
  bool holds = false;
};

/// lhs > rhs. False means not established at this lambda, nothing more.
/// Throws DomainError for s >= d.
SSCheck check_SS_condition(const PairPotential& p, double lambda);

struct BConstants {
  std::size_t N0 = 0;
  double B = 0.0;
};

/// N0 = least N with I - e^(N) <= eps, where I is the cell lower bound at
/// lambda; B = max{phi0 (e^(N0) - e^(2)) N0, v0 / 2}. e_values must start at
/// N = 2. Throws DomainError when no listed N reaches the threshold.
BConstants compute_B_theorem1(const PairPotential& p, double lambda, double eps,
                              const std::vector<std::pair<std::size_t, double>>& e_values, double v0);

/// N0 = least N >= 2 with (C_d - eps) ln N > v0/2;
/// B = v0/2 + sum_{i=2}^{N0-1} (C_d - eps) i ln i. Throws DomainError unless 0 < eps < C_d.
BConstants compute_B_theorem2(int d, double lambda, double phi0, double eps, double v0);

/// core_radius / sqrt(d) halved `steps` times (including the first entry).
std::vector<double> default_lambda_grid(const PairPotential& p, int steps = 8);

struct CertifyBudget {
  std::size_t n_max = 12;  // largest N minimized for the e-sequence
  MinimizeOptions minimizer{};
};

/// Necessary conditions first (Unstable on failure), then the sampled
/// Assumption (A) check (Unknown on failure), then dispatch on s vs d.
/// Only lambdas with sqrt(d) lambda <= core_radius are used, so every pair
/// inside a cell is in the core. Evidence records every step.
StabilityCertificate certify(const PairPotential& p, std::vector<double> lambda_grid = {},
                             std::optional<double> epsilon = std::nullopt, const CertifyBudget& budget = {});

/// A lambda^d. Throws DomainError for A < 0 or lambda <= 0.
double ginibre_constants(double A, double lambda, int d);

struct SamplerOptions {
  std::size_t trials = 10000;
  std::size_t n_max = 20;
  double box_rib = 10.0;
  std::uint64_t seed = 1;
};

struct FalsificationReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::optional<double> min_slack;
  std::optional<std::size_t> worst_trial;
  std::optional<std::size_t> first_violation_trial;
  std::optional<Configuration> counterexample;
};

/// Random configurations checked against
///   U(gamma) >= sum_{Delta : |gamma_Delta| >= 2} A |gamma_Delta|^p - B |gamma|
/// on the partition of rib cert.lambda. Trial t draws its size (uniform in
/// 2..n_max) and points from std::mt19937_64(seed + t). A violation is a
/// slack below -1e-9 (|U| + |rhs| + 1). Throws ConfigError unless the
/// certificate is S, SS or SSS.
FalsificationReport empirical_bound_test(const PairPotential& p, const StabilityCertificate& cert,
                                         const SamplerOptions& opts = {});

/// Right-hand side of the certified inequality for one configuration.
double certified_lower_bound(const Configuration& gamma, const StabilityCertificate& cert);

}  // namespace rstab
