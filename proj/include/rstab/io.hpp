#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include <json.hpp>

#include "rstab/certifier.hpp"
#include "rstab/geometry.hpp"
#include "rstab/minimizer.hpp"
#include "rstab/potentials.hpp"

namespace rstab::io {

using Json = nlohmann::ordered_json;

/// `key = value` lines. Blank lines and text after '#' are ignored; values
/// may be wrapped in double quotes. Throws ConfigError on a malformed line
/// or a repeated key.
std::map<std::string, std::string> parse_key_values(std::istream& in);

/// Potential from parsed keys. `kind` selects the family:
///   riesz         dimension core_exponent core_strength core_radius
///                 tail_radius tail_strength tail_exponent
///   square_well   dimension height core_radius depth [well_radius]
///   lj_like       dimension lj_exponent lj_strength lj_sigma cutoff
///   custom-table  table (CSV path, relative to base_dir) plus the seven
///                 Assumption (A) fields of riesz
/// Unknown keys are rejected.
PairPotential potential_from_keys(const std::map<std::string, std::string>& keys,
                                  const std::filesystem::path& base_dir);

PairPotential load_potential(const std::filesystem::path& path);

/// Two columns r, Phi(r); an optional non-numeric header row is skipped.
std::vector<std::pair<double, double>> read_table_csv(std::istream& in);

/// Header x1,...,xd then one point per row, 17 significant digits.
void write_configuration_csv(std::ostream& out, const Configuration& gamma);
Configuration read_configuration_csv(std::istream& in);

Json to_json(const Configuration& gamma);
Configuration configuration_from_json(const Json& j);

Json to_json(const MinimizationResult& r, const Domain& dom, double s, std::uint64_t seed);
Json to_json(const StabilityCertificate& c);
StabilityCertificate certificate_from_json(const Json& j);
Json to_json(const FalsificationReport& r, const SamplerOptions& opts);

/// {d, s, regime, I_s_ball, ...}; fields outside their regime are omitted.
Json constants_json(int d, double s, double radius, double lambda, double phi0);

/// Shortest round-trip decimal form of a double ("%.17g" trimmed).
std::string format_double(double v);

}  // namespace rstab::io
