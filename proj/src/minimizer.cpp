#include "rstab/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>

#include "rstab/error.hpp"
#include "rstab/kernels.hpp"
#include "rstab/riesz.hpp"

namespace rstab {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kShrink = 0.5;
constexpr double kMinSeparation = 1e-8;  // times the domain diameter
constexpr int kMaxBacktracks = 80;
constexpr int kStallWindow = 50;
constexpr double kTieTolerance = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Gradient with the components that push through an active boundary removed.
void projected_gradient(const Domain& dom, std::span<const double> x, std::span<const double> g,
                        std::span<double> out) {
  const int d = dom.dimension();
  const std::size_t n = x.size() / static_cast<std::size_t>(d);
  std::copy(g.begin(), g.end(), out.begin());
  if (dom.kind() == Domain::Kind::Cube) {
    const double h = 0.5 * dom.size();
    const double edge = h * (1.0 - 1e-14);
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k] >= edge && g[k] < 0.0) out[k] = 0.0;
      if (x[k] <= -edge && g[k] > 0.0) out[k] = 0.0;
    }
    return;
  }
  const double r = dom.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = &x[i * d];
    double rho2 = 0.0;
    double gx = 0.0;
    for (int k = 0; k < d; ++k) {
      rho2 += xi[k] * xi[k];
      gx += g[i * d + k] * xi[k];
    }
    if (rho2 >= r * r * (1.0 - 1e-14) && gx < 0.0) {
      const double c = gx / rho2;
      for (int k = 0; k < d; ++k) out[i * d + k] = g[i * d + k] - c * xi[k];
    }
  }
}

struct Descent {
  std::vector<double> x;
  double energy = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
};

// Projected gradient descent from x0 (already inside the domain). Spectral
// (Barzilai-Borwein) trial steps, monotone Armijo backtracking along the
// projection arc.
Descent descend(std::vector<double> x, const Domain& dom, double s, const MinimizeOptions& opts) {
  const int d = dom.dimension();
  const std::size_t n = x.size() / static_cast<std::size_t>(d);
  const std::size_t m = x.size();
  const double min_sep = kMinSeparation * dom.diameter();
  std::vector<double> g(m), pg(m), x_new(m), g_new(m);

  Descent out;
  auto ev = kernels::omp::riesz(x, d, s, g);
  if (ev.coincident) throw DomainError("minimizer: start has coincident points");
  double energy = ev.energy;
  double alpha = 0.0;
  double stall_ref = energy;
  int stall_age = 0;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    projected_gradient(dom, x, g, pg);
    const double pg_norm = std::sqrt(dot(pg, pg));
    out.gradient_norm = pg_norm;
    if (pg_norm <= opts.grad_tol * static_cast<double>(n)) break;
    if (alpha <= 0.0) alpha = 0.01 * dom.diameter() / std::max(pg_norm, 1e-300);

    bool accepted = false;
    double e_new = energy;
    for (int bt = 0; bt < kMaxBacktracks; ++bt, alpha *= kShrink) {
      for (std::size_t k = 0; k < m; ++k) x_new[k] = x[k] - alpha * g[k];
      dom.project(x_new);
      double decrease = 0.0;  // g . (x_new - x), <= 0 for a descent step
      for (std::size_t k = 0; k < m; ++k) decrease += g[k] * (x_new[k] - x[k]);
      if (decrease == 0.0) break;
      const auto trial = kernels::omp::riesz(x_new, d, s, g_new);
      if (trial.coincident || trial.min_distance < min_sep) continue;
      if (trial.energy <= energy + kArmijo * decrease) {
        e_new = trial.energy;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    // Spectral step for the next iteration.
    double ss = 0.0;
    double sy = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double dx = x_new[k] - x[k];
      ss += dx * dx;
      sy += dx * (g_new[k] - g[k]);
    }
    alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-30, 1e30) : alpha * 4.0;

    x.swap(x_new);
    g.swap(g_new);
    energy = e_new;

    if (stall_ref - energy > 1e-15 * std::abs(energy)) {
      stall_ref = energy;
      stall_age = 0;
    } else if (++stall_age >= kStallWindow) {
      ++it;
      break;
    }
  }
  out.x = std::move(x);
  out.energy = energy;
  out.iterations = it;
  return out;
}

std::vector<double> random_start(std::size_t n, const Domain& dom, std::uint64_t seed) {
  const int d = dom.dimension();
  std::mt19937_64 rng(seed);
  std::vector<double> x;
  x.reserve(n * static_cast<std::size_t>(d));
  std::vector<double> p(static_cast<std::size_t>(d));
  const double half = dom.kind() == Domain::Kind::Cube ? 0.5 * dom.size() : dom.size();
  while (x.size() < n * static_cast<std::size_t>(d)) {
    for (auto& c : p) c = half * (2.0 * unit_uniform(rng) - 1.0);
    if (!dom.contains(p, 0.0)) continue;
    x.insert(x.end(), p.begin(), p.end());
  }
  return x;
}

void check_inputs(std::size_t, const Domain&, double s) {
  if (!(s > 0.0)) {
    throw ConfigError("minimizer: s must be > 0 (s = 0 is excluded; e^(N) = (1 - 1/N)/2 exactly)");
  }
}

MinimizationResult finish(const Domain& dom, std::vector<double> x, double s) {
  MinimizationResult r{Configuration(dom.dimension(), std::move(x))};
  r.configuration = r.configuration.sorted();
  const std::size_t n = r.configuration.size();
  r.energy = n >= 2 ? riesz_energy(r.configuration, s) : 0.0;
  r.normalized = n >= 2 ? normalized_energy(r.energy, n) : 0.0;
  return r;
}

bool lex_less(const Configuration& a, const Configuration& b) {
  const auto x = a.coordinates();
  const auto y = b.coordinates();
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

}  // namespace

Domain::Domain(Kind kind, int dimension, double size) : kind_(kind), dim_(dimension), size_(size) {
  if (dimension < 1) throw ConfigError("domain: dimension must be >= 1");
  if (!(size > 0.0) || !std::isfinite(size)) throw ConfigError("domain: rib/radius must be positive and finite");
}

Domain Domain::cube(int dimension, double rib) { return Domain(Kind::Cube, dimension, rib); }
Domain Domain::ball(int dimension, double radius) { return Domain(Kind::Ball, dimension, radius); }

double Domain::diameter() const noexcept {
  return kind_ == Kind::Cube ? size_ * std::sqrt(static_cast<double>(dim_)) : 2.0 * size_;
}

bool Domain::contains(std::span<const double> x, double slack) const {
  if (kind_ == Kind::Cube) {
    const double h = 0.5 * size_ + slack;
    return std::all_of(x.begin(), x.end(), [h](double c) { return std::abs(c) <= h; });
  }
  double r2 = 0.0;
  for (const double c : x) r2 += c * c;
  return std::sqrt(r2) <= size_ + slack;
}

void Domain::project(std::span<double> coords) const {
  if (kind_ == Kind::Cube) {
    const double h = 0.5 * size_;
    for (auto& c : coords) c = std::clamp(c, -h, h);
    return;
  }
  const auto d = static_cast<std::size_t>(dim_);
  for (std::size_t i = 0; i + d <= coords.size(); i += d) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) r2 += coords[i + k] * coords[i + k];
    if (r2 > size_ * size_) {
      const double scale = size_ / std::sqrt(r2);
      for (std::size_t k = 0; k < d; ++k) coords[i + k] *= scale;
    }
  }
}

std::string Domain::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << (kind_ == Kind::Cube ? "cube:" : "ball:") << size_;
  return os.str();
}

std::vector<double> riesz_gradient(const Configuration& gamma, double s) {
  if (!(s > 0.0)) throw DomainError("riesz_gradient: s must be > 0");
  std::vector<double> g(gamma.coordinates().size(), 0.0);
  const auto ev = kernels::omp::riesz(gamma.coordinates(), gamma.dimension(), s, g);
  if (ev.coincident) {
    throw DomainError("riesz_gradient: coincident points at indices " + std::to_string(ev.coincident->first) +
                      " and " + std::to_string(ev.coincident->second));
  }
  return g;
}

MinimizationResult minimize_configuration(std::size_t n, const Domain& dom, double s,
                                          const MinimizeOptions& opts) {
  check_inputs(n, dom, s);
  if (opts.starts && *opts.starts == 0) throw ConfigError("minimizer: starts must be >= 1");
  if (opts.max_iters < 0) throw ConfigError("minimizer: max_iters must be >= 0");
  if (!(opts.grad_tol >= 0.0)) throw ConfigError("minimizer: grad_tol must be >= 0");
  if (n == 0) return MinimizationResult{Configuration(dom.dimension())};

  const std::size_t starts = opts.starts.value_or(8 + 2 * n);
  std::vector<Descent> runs(starts);
  std::vector<std::exception_ptr> errors(starts);
  const auto ns = static_cast<std::ptrdiff_t>(starts);
#pragma omp parallel for schedule(dynamic, 1) if (starts > 1 && !kernels::in_parallel())
  for (std::ptrdiff_t k = 0; k < ns; ++k) {
    try {
      auto x0 = random_start(n, dom, opts.seed + static_cast<std::uint64_t>(k));
      runs[k] = n >= 2 ? descend(std::move(x0), dom, s, opts) : Descent{std::move(x0)};
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Serial reduction in start order.
  std::optional<MinimizationResult> best;
  for (std::size_t k = 0; k < starts; ++k) {
    MinimizationResult r = finish(dom, std::move(runs[k].x), s);
    r.iterations = runs[k].iterations;
    r.gradient_norm = runs[k].gradient_norm;
    r.best_start = k;
    if (!best) {
      best = std::move(r);
      continue;
    }
    const double diff = r.energy - best->energy;
    const bool better = diff < -kTieTolerance ||
                        (std::abs(diff) <= kTieTolerance && lex_less(r.configuration, best->configuration));
    if (better) best = std::move(r);
  }
  best->starts_attempted = starts;
  return *best;
}

MinimizationResult brute_force_min(std::size_t n, const Domain& dom, double s, int grid_per_axis) {
  check_inputs(n, dom, s);
  const int d = dom.dimension();
  if (n > 4) throw ConfigError("brute_force_min: N must be <= 4");
  if (grid_per_axis < 8) throw ConfigError("brute_force_min: grid_per_axis must be >= 8");
  if (static_cast<std::size_t>(d) * n > 8) throw ConfigError("brute_force_min: d*N must be <= 8");
  if (n == 0) return MinimizationResult{Configuration(d)};

  // Grid points.
  const double half = dom.kind() == Domain::Kind::Cube ? 0.5 * dom.size() : dom.size();
  std::vector<double> axis(static_cast<std::size_t>(grid_per_axis));
  for (int i = 0; i < grid_per_axis; ++i) axis[i] = -half + 2.0 * half * i / (grid_per_axis - 1);
  std::vector<double> pts;
  std::vector<double> p(static_cast<std::size_t>(d));
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(grid_per_axis);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (int k = d - 1; k >= 0; --k) {
      p[k] = axis[c % grid_per_axis];
      c /= grid_per_axis;
    }
    if (dom.contains(p)) {
      dom.project(p);
      pts.insert(pts.end(), p.begin(), p.end());
    }
  }
  const std::size_t m = pts.size() / static_cast<std::size_t>(d);
  if (m < n) throw ConfigError("brute_force_min: grid has fewer points than N");

  std::vector<double> pair(m * m, 0.0);
  const kernels::RieszPower power{s};
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const double v = power(kernels::squared_distance(&pts[a * d], &pts[b * d], d));
      pair[a * m + b] = v;
      pair[b * m + a] = v;
    }
  }

  // Depth-first over a_1 < a_2 < ... with pruning on the partial energy
  // (every term is positive).
  std::vector<std::size_t> pick(n), best_pick(n);
  double best = std::numeric_limits<double>::infinity();
  auto search = [&](auto&& self, std::size_t depth, std::size_t from, double partial) -> void {
    if (depth == n) {
      if (partial < best) {
        best = partial;
        best_pick = pick;
      }
      return;
    }
    for (std::size_t a = from; a + (n - depth) <= m; ++a) {
      double e = partial;
      for (std::size_t q = 0; q < depth; ++q) e += pair[pick[q] * m + a];
      if (e >= best) continue;
      pick[depth] = a;
      self(self, depth + 1, a + 1, e);
    }
  };
  search(search, 0, 0, 0.0);

  std::vector<double> x;
  for (const auto a : best_pick) x.insert(x.end(), pts.begin() + a * d, pts.begin() + (a + 1) * d);
  MinimizeOptions polish;
  Descent run = n >= 2 ? descend(std::move(x), dom, s, polish) : Descent{std::move(x)};
  MinimizationResult r = finish(dom, std::move(run.x), s);
  r.iterations = run.iterations;
  r.gradient_norm = run.gradient_norm;
  r.starts_attempted = 1;
  r.label = "grid oracle";
  return r;
}

ESequence e_sequence(const Domain& dom, double s, const std::vector<std::size_t>& ns,
                     const MinimizeOptions& opts, double tolerance) {
  ESequence out;
  for (const auto n : ns) {
    if (n < 2) throw ConfigError("e_sequence: every N must be >= 2");
  }
  for (const auto n : ns) {
    double e = 0.0;
    if (s == 0.0) {
      e = 0.5 * (1.0 - 1.0 / static_cast<double>(n));
    } else {
      e = minimize_configuration(n, dom, s, opts).normalized;
    }
    if (!out.values.empty() && e < out.values.back().second - tolerance) out.decreases.push_back(n);
    out.values.emplace_back(n, e);
  }
  return out;
}

std::vector<double> spatial_histogram(const Configuration& gamma, const Domain& dom, int bins) {
  if (bins < 2) throw ConfigError("spatial_histogram: bins must be >= 2");
  if (gamma.dimension() != dom.dimension()) throw ConfigError("spatial_histogram: dimension mismatch");
  const int d = dom.dimension();
  std::size_t cells = static_cast<std::size_t>(bins);
  if (dom.kind() == Domain::Kind::Cube) {
    cells = 1;
    for (int k = 0; k < d; ++k) cells *= static_cast<std::size_t>(bins);
  }
  std::vector<double> counts(cells, 0.0);
  const std::size_t n = gamma.size();
  if (n == 0) return counts;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = gamma.point(i);
    std::size_t idx = 0;
    if (dom.kind() == Domain::Kind::Ball) {
      double r2 = 0.0;
      for (const double c : x) r2 += c * c;
      const double frac = std::pow(std::sqrt(r2) / dom.size(), d);
      idx = static_cast<std::size_t>(std::clamp(std::floor(frac * bins), 0.0, bins - 1.0));
    } else {
      for (int k = 0; k < d; ++k) {
        const double u = x[k] / dom.size() + 0.5;
        const auto b = static_cast<std::size_t>(std::clamp(std::floor(u * bins), 0.0, bins - 1.0));
        idx = idx * static_cast<std::size_t>(bins) + b;
      }
    }
    counts[idx] += 1.0;
  }
  for (auto& c : counts) c /= static_cast<double>(n);
  return counts;
}

}  // namespace rstab
