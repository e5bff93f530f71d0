#include "rstab/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "rstab/error.hpp"
#include "rstab/riesz.hpp"

namespace rstab::io {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

double number(const std::map<std::string, std::string>& keys, const std::string& name) {
  const auto it = keys.find(name);
  if (it == keys.end()) throw ConfigError("potential config: missing key '" + name + "'");
  const auto v = parse_double(it->second);
  if (!v) throw ConfigError("potential config: '" + name + "' is not a number: " + it->second);
  return *v;
}

int integer(const std::map<std::string, std::string>& keys, const std::string& name) {
  const double v = number(keys, name);
  if (v != std::floor(v) || v < 1 || v > 64) throw ConfigError("potential config: '" + name + "' must be an integer in [1, 64]");
  return static_cast<int>(v);
}

void reject_unknown(const std::map<std::string, std::string>& keys, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : keys) {
    if (!allowed.contains(k)) throw ConfigError("potential config: unknown key '" + k + "'");
  }
}

AssumptionA assumption_from_keys(const std::map<std::string, std::string>& keys) {
  AssumptionA a;
  a.dimension = integer(keys, "dimension");
  a.core_exponent = number(keys, "core_exponent");
  a.core_strength = number(keys, "core_strength");
  a.core_radius = number(keys, "core_radius");
  a.tail_radius = number(keys, "tail_radius");
  a.tail_strength = number(keys, "tail_strength");
  a.tail_exponent = number(keys, "tail_exponent");
  return a;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double json_number(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return csv_double(v);
  return std::string(buf, ptr);
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second) throw ConfigError("config line " + std::to_string(lineno) + ": repeated key '" + key + "'");
  }
  return out;
}

PairPotential potential_from_keys(const std::map<std::string, std::string>& keys,
                                  const std::filesystem::path& base_dir) {
  const auto kind_it = keys.find("kind");
  if (kind_it == keys.end()) throw ConfigError("potential config: missing key 'kind'");
  const std::string& kind = kind_it->second;
  const std::set<std::string> meta_keys = {"kind",        "dimension",   "core_exponent", "core_strength",
                                           "core_radius", "tail_radius", "tail_strength", "tail_exponent"};
  if (kind == "riesz") {
    reject_unknown(keys, meta_keys);
    return riesz_potential(assumption_from_keys(keys));
  }
  if (kind == "square_well") {
    reject_unknown(keys, {"kind", "dimension", "height", "core_radius", "depth", "well_radius"});
    const double core = number(keys, "core_radius");
    const double well = keys.contains("well_radius") ? number(keys, "well_radius") : core;
    return square_well(integer(keys, "dimension"), number(keys, "height"), core, number(keys, "depth"), well);
  }
  if (kind == "lj_like") {
    reject_unknown(keys, {"kind", "dimension", "lj_exponent", "lj_strength", "lj_sigma", "cutoff"});
    return lj_like(integer(keys, "dimension"), number(keys, "lj_exponent"), number(keys, "lj_strength"),
                   number(keys, "lj_sigma"), number(keys, "cutoff"));
  }
  if (kind == "custom-table") {
    auto allowed = meta_keys;
    allowed.insert("table");
    reject_unknown(keys, allowed);
    const auto t = keys.find("table");
    if (t == keys.end()) throw ConfigError("potential config: custom-table needs 'table'");
    const std::filesystem::path table = base_dir / t->second;
    std::ifstream in(table);
    if (!in) throw ConfigError("potential config: cannot open table " + table.string());
    return tabulated(read_table_csv(in), assumption_from_keys(keys));
  }
  throw ConfigError("potential config: unknown kind '" + kind + "' (riesz|square_well|lj_like|custom-table)");
}

PairPotential load_potential(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open potential config " + path.string());
  return potential_from_keys(parse_key_values(in), path.parent_path());
}

std::vector<std::pair<double, double>> read_table_csv(std::istream& in) {
  std::vector<std::pair<double, double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    const auto r = comma == std::string::npos ? std::nullopt : parse_double(t.substr(0, comma));
    const auto v = comma == std::string::npos ? std::nullopt : parse_double(t.substr(comma + 1));
    if (!r || !v) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw ConfigError("table line " + std::to_string(lineno) + ": expected two numbers r,phi");
    }
    rows.emplace_back(*r, *v);
  }
  return rows;
}

void write_configuration_csv(std::ostream& out, const Configuration& gamma) {
  const int d = gamma.dimension();
  for (int k = 0; k < d; ++k) out << (k ? "," : "") << 'x' << (k + 1);
  out << '\n';
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const auto p = gamma.point(i);
    for (int k = 0; k < d; ++k) out << (k ? "," : "") << csv_double(p[k]);
    out << '\n';
  }
}

Configuration read_configuration_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("configuration CSV: empty input");
  int d = 0;
  {
    std::stringstream hs(trim(line));
    std::string col;
    while (std::getline(hs, col, ',')) {
      if (trim(col) != "x" + std::to_string(d + 1)) throw ConfigError("configuration CSV: header must be x1,...,xd");
      ++d;
    }
  }
  if (d == 0) throw ConfigError("configuration CSV: header must be x1,...,xd");
  Configuration gamma(d);
  std::vector<double> p(static_cast<std::size_t>(d));
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::stringstream ls(line);
    std::string col;
    int k = 0;
    while (std::getline(ls, col, ',')) {
      const auto v = parse_double(col);
      if (!v || k >= d) throw ConfigError("configuration CSV line " + std::to_string(lineno) + ": bad row");
      p[k++] = *v;
    }
    if (k != d) throw ConfigError("configuration CSV line " + std::to_string(lineno) + ": expected " + std::to_string(d) + " values");
    gamma.push_back(p);
  }
  return gamma;
}

Json to_json(const Configuration& gamma) {
  Json points = Json::array();
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const auto p = gamma.point(i);
    points.push_back(Json(std::vector<double>(p.begin(), p.end())));
  }
  return Json{{"dimension", gamma.dimension()}, {"points", std::move(points)}};
}

Configuration configuration_from_json(const Json& j) {
  try {
    const int d = j.at("dimension").get<int>();
    Configuration gamma(d);
    for (const auto& p : j.at("points")) {
      const auto v = p.get<std::vector<double>>();
      gamma.push_back(v);
    }
    return gamma;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("configuration JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("configuration JSON: ") + e.what());
  }
}

Json to_json(const MinimizationResult& r, const Domain& dom, double s, std::uint64_t seed) {
  const std::size_t n = r.configuration.size();
  Json j;
  j["label"] = r.label;
  j["d"] = dom.dimension();
  j["s"] = s;
  j["domain"] = Json{{"kind", dom.kind() == Domain::Kind::Cube ? "cube" : "ball"}, {"size", dom.size()}};
  j["N"] = n;
  j["energy"] = r.energy;
  j["normalized_energy"] = r.normalized;
  if (dom.dimension() == 1 && n >= 1) j["energy_over_N_pow_1_plus_s"] = r.energy / std::pow(static_cast<double>(n), 1.0 + s);
  j["iterations"] = r.iterations;
  j["gradient_norm"] = number_or_null(r.gradient_norm);
  j["starts_attempted"] = r.starts_attempted;
  j["best_start"] = r.best_start;
  j["seed"] = seed;
  j["configuration"] = to_json(r.configuration);
  return j;
}

Json to_json(const StabilityCertificate& c) {
  Json j;
  j["classification"] = to_string(c.classification);
  j["A"] = c.A;
  j["B"] = c.B;
  j["p"] = c.p;
  j["lambda"] = c.lambda;
  j["v0"] = Json{{"value", number_or_null(c.v0.value)}, {"remainder", number_or_null(c.v0.remainder)}};
  j["regime"] = to_string(c.regime);
  j["epsilon"] = c.epsilon;
  j["N0"] = c.N0 ? Json(*c.N0) : Json(nullptr);
  Json ev = Json::array();
  for (const auto& e : c.evidence) {
    Json item{{"name", e.name}, {"value", number_or_null(e.value)}, {"holds", e.holds}};
    if (!e.note.empty()) item["note"] = e.note;
    ev.push_back(std::move(item));
  }
  j["evidence"] = std::move(ev);
  return j;
}

StabilityCertificate certificate_from_json(const Json& j) {
  try {
    StabilityCertificate c;
    c.classification = classification_from_string(j.at("classification").get<std::string>());
    c.A = j.at("A").get<double>();
    c.B = j.at("B").get<double>();
    c.p = j.at("p").get<double>();
    c.lambda = j.at("lambda").get<double>();
    c.v0.value = json_number(j.at("v0").at("value"));
    c.v0.remainder = json_number(j.at("v0").at("remainder"));
    const std::string regime = j.at("regime").get<std::string>();
    bool found = false;
    for (auto r : {Regime::Flat, Regime::Boundary, Regime::Interior, Regime::Critical, Regime::Hypersingular}) {
      if (to_string(r) == regime) {
        c.regime = r;
        found = true;
      }
    }
    if (!found) throw ConfigError("certificate JSON: unknown regime '" + regime + "'");
    c.epsilon = j.at("epsilon").get<double>();
    if (!j.at("N0").is_null()) c.N0 = j.at("N0").get<std::size_t>();
    for (const auto& e : j.at("evidence")) {
      c.evidence.push_back({e.at("name").get<std::string>(), json_number(e.at("value")), e.at("holds").get<bool>(),
                            e.contains("note") ? e.at("note").get<std::string>() : std::string()});
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("certificate JSON: ") + e.what());
  }
}

Json to_json(const FalsificationReport& r, const SamplerOptions& opts) {
  Json j;
  j["trials"] = r.trials;
  j["n_max"] = opts.n_max;
  j["box_rib"] = opts.box_rib;
  j["seed"] = opts.seed;
  j["violations"] = r.violations;
  j["verdict"] = r.trials == 0 ? "no trials" : (r.violations == 0 ? "no violation" : "counterexample found");
  j["min_slack"] = r.min_slack ? number_or_null(*r.min_slack) : Json(nullptr);
  j["worst_trial"] = r.worst_trial ? Json(*r.worst_trial) : Json(nullptr);
  j["first_violation_trial"] = r.first_violation_trial ? Json(*r.first_violation_trial) : Json(nullptr);
  j["counterexample"] = r.counterexample ? to_json(*r.counterexample) : Json(nullptr);
  return j;
}

Json constants_json(int d, double s, double radius, double lambda, double phi0) {
  const Regime regime = classify_regime(d, s);
  Json j;
  j["d"] = d;
  j["s"] = s;
  j["regime"] = to_string(regime);
  j["radius"] = radius;
  j["lambda"] = lambda;
  j["phi0"] = phi0;
  if (s < d) {
    j["I_s_ball"] = energy_integral_ball(d, s, radius);
    j["I_s_ball_equilibrium"] = equilibrium_energy_ball(d, s, radius);
  }
  if (s == d) j["C_d"] = constant_Cd(d, lambda, phi0);
  if (s > d) j["C_sd"] = constant_Csd(d, s, lambda, phi0);
  if (d == 1 && s > 1.0) j["zeta_limit"] = d1_zeta_limit(s);
  return j;
}

}  // namespace rstab::io
