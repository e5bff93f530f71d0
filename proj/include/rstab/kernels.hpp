#pragma once

// Pairwise O(N^2) kernels over a flat coordinate array (N points, d doubles
// each). Two implementations are kept side by side:
//
//   serial::  one compensated accumulator in lexicographic pair order. This is
//             the reference the tests compare against.
//   omp::     one compensated accumulator per row i (pairs j > i), rows
//             combined in row order. Row arithmetic does not depend on the
//             thread that runs it, so results are bitwise identical for any
//             thread count, including when nested inside another parallel
//             region (where the loop runs serially).
//
// Every kernel reports the first coincident pair it meets instead of
// throwing, since exceptions cannot leave an OpenMP region.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rstab::kernels {

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

using IndexPair = std::pair<std::size_t, std::size_t>;

struct PairSum {
  double value = 0.0;
  double abs_value = 0.0;  // sum of |f|, the scale for rounding tolerances
  std::optional<IndexPair> coincident;
};

struct RieszEval {
  double energy = 0.0;
  double min_distance = std::numeric_limits<double>::infinity();
  std::optional<IndexPair> coincident;
};

inline double squared_distance(const double* a, const double* b, int d) noexcept {
  double r2 = 0.0;
  for (int k = 0; k < d; ++k) {
    const double diff = a[k] - b[k];
    r2 += diff * diff;
  }
  return r2;
}

/// r^{-s} from r^2, with cheap paths for small integer exponents.
struct RieszPower {
  double s;

  double operator()(double r2) const noexcept {
    if (s == 0.0) return 1.0;
    if (s == 1.0) return 1.0 / std::sqrt(r2);
    if (s == 2.0) return 1.0 / r2;
    if (s == 3.0) return 1.0 / (r2 * std::sqrt(r2));
    if (s == 4.0) return 1.0 / (r2 * r2);
    return std::pow(r2, -0.5 * s);
  }
};

inline int thread_count() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline bool in_parallel() noexcept {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

// Row counts below this run single-threaded; the result is the same either way.
inline constexpr std::size_t kParallelThreshold = 256;

namespace serial {

/// Sum of f(|x_i - x_j|) over i < j.
template <class F>
PairSum pair_sum(std::span<const double> x, int d, F&& f) {
  const std::size_t n = x.size() / static_cast<std::size_t>(d);
  CompensatedSum total;
  CompensatedSum total_abs;
  PairSum out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r2 = squared_distance(&x[i * d], &x[j * d], d);
      if (r2 == 0.0) {
        if (!out.coincident) out.coincident = IndexPair{i, j};
        continue;
      }
      const double v = f(std::sqrt(r2));
      total.add(v);
      total_abs.add(std::abs(v));
    }
  }
  out.value = total.value();
  out.abs_value = total_abs.value();
  return out;
}

/// Riesz s-energy; when grad is non-empty it receives dE/dx (N*d values).
inline RieszEval riesz(std::span<const double> x, int d, double s, std::span<double> grad = {}) {
  const std::size_t n = x.size() / static_cast<std::size_t>(d);
  const RieszPower power{s};
  const bool want_grad = !grad.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
  CompensatedSum energy;
  RieszEval out;
  double min_r2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r2 = squared_distance(&x[i * d], &x[j * d], d);
      if (r2 == 0.0) {
        if (!out.coincident) out.coincident = IndexPair{i, j};
        min_r2 = 0.0;
        continue;
      }
      min_r2 = std::min(min_r2, r2);
      const double t = power(r2);
      energy.add(t);
      if (want_grad) {
        const double scale = -s * t / r2;
        for (int k = 0; k < d; ++k) {
          const double c = scale * (x[i * d + k] - x[j * d + k]);
          grad[i * d + k] += c;
          grad[j * d + k] -= c;
        }
      }
    }
  }
  out.energy = energy.value();
  out.min_distance = std::sqrt(min_r2);
  return out;
}

}  // namespace serial

namespace omp {

template <class F>
PairSum pair_sum(std::span<const double> x, int d, F&& f) {
  const std::size_t n = x.size() / static_cast<std::size_t>(d);
  std::vector<double> row(n, 0.0);
  std::vector<double> row_abs(n, 0.0);
  std::vector<std::size_t> bad(n, n);
  const bool par = n >= kParallelThreshold && !in_parallel();
  const auto ni = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 16) if (par)
  for (std::ptrdiff_t ii = 0; ii < ni; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    CompensatedSum acc;
    CompensatedSum acc_abs;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r2 = squared_distance(&x[i * d], &x[j * d], d);
      if (r2 == 0.0) {
        if (bad[i] == n) bad[i] = j;
        continue;
      }
      const double v = f(std::sqrt(r2));
      acc.add(v);
      acc_abs.add(std::abs(v));
    }
    row[i] = acc.value();
    row_abs[i] = acc_abs.value();
  }
  PairSum out;
  CompensatedSum total;
  CompensatedSum total_abs;
  for (std::size_t i = 0; i < n; ++i) {
    total.add(row[i]);
    total_abs.add(row_abs[i]);
    if (!out.coincident && bad[i] != n) out.coincident = IndexPair{i, bad[i]};
  }
  out.value = total.value();
  out.abs_value = total_abs.value();
  return out;
}

/// Same contract as serial::riesz. Each row accumulates its full gradient
/// (all j != i) so rows are independent; the energy uses only j > i.
inline RieszEval riesz(std::span<const double> x, int d, double s, std::span<double> grad = {}) {
  const std::size_t n = x.size() / static_cast<std::size_t>(d);
  const RieszPower power{s};
  const bool want_grad = !grad.empty();
  std::vector<double> row(n, 0.0);
  std::vector<double> row_min(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> bad(n, n);
  const bool par = n >= kParallelThreshold / 2 && !in_parallel();
  const auto ni = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t ii = 0; ii < ni; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    CompensatedSum acc;
    double g[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    std::vector<double> g_heap;
    double* gi = g;
    if (want_grad && d > 8) {
      g_heap.assign(static_cast<std::size_t>(d), 0.0);
      gi = g_heap.data();
    }
    double min_r2 = std::numeric_limits<double>::infinity();
    const std::size_t j0 = want_grad ? 0 : i + 1;
    for (std::size_t j = j0; j < n; ++j) {
      if (j == i) continue;
      const double r2 = squared_distance(&x[i * d], &x[j * d], d);
      if (r2 == 0.0) {
        if (j > i && bad[i] == n) bad[i] = j;
        min_r2 = 0.0;
        continue;
      }
      min_r2 = std::min(min_r2, r2);
      const double t = power(r2);
      if (j > i) acc.add(t);
      if (want_grad) {
        const double scale = -s * t / r2;
        for (int k = 0; k < d; ++k) gi[k] += scale * (x[i * d + k] - x[j * d + k]);
      }
    }
    row[i] = acc.value();
    row_min[i] = min_r2;
    if (want_grad) {
      for (int k = 0; k < d; ++k) grad[i * d + k] = gi[k];
    }
  }
  RieszEval out;
  CompensatedSum total;
  double min_r2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    total.add(row[i]);
    min_r2 = std::min(min_r2, row_min[i]);
    if (!out.coincident && bad[i] != n) out.coincident = IndexPair{i, bad[i]};
  }
  out.energy = total.value();
  out.min_distance = std::sqrt(min_r2);
  return out;
}

}  // namespace omp

}  // namespace rstab::kernels
