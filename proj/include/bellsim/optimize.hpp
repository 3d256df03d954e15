#pragma once

// CHSH maximization over the four analyzer phases and the critical
// detector efficiency for a given double-click distinguishability.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "bellsim/bell.hpp"
#include "bellsim/error.hpp"
#include "bellsim/parallel.hpp"

namespace bellsim {

inline constexpr int kDefaultStarts = 64;
inline constexpr double kDefaultSimplexTolerance = 1e-9;
inline constexpr double kDefaultEfficiencyTolerance = 1e-4;

template <std::size_t N>
using Point = std::array<double, N>;

template <std::size_t N>
struct SimplexResult {
  Point<N> x{};
  double value = 0.0;  // objective at x (minimized)
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead minimization with standard coefficients (reflect 1, expand 2,
/// contract ½, shrink ½). Converged when every vertex lies within `tol` of the
/// best one in the max norm.
template <std::size_t N, typename F>
SimplexResult<N> nelder_mead(F&& f, const Point<N>& start, double step, double tol, int max_iterations = 20000) {
  std::array<Point<N>, N + 1> v;
  std::array<double, N + 1> fv;
  v[0] = start;
  for (std::size_t i = 0; i < N; ++i) {
    v[i + 1] = start;
    v[i + 1][i] += step;
  }
  for (std::size_t i = 0; i <= N; ++i) fv[i] = f(v[i]);

  auto along = [](const Point<N>& from, const Point<N>& to, double t) {
    Point<N> p;
    for (std::size_t k = 0; k < N; ++k) p[k] = from[k] + t * (to[k] - from[k]);
    return p;
  };

  SimplexResult<N> out;
  std::array<std::size_t, N + 1> order;
  for (int it = 0; it < max_iterations; ++it) {
    for (std::size_t i = 0; i <= N; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order[0], worst = order[N], second = order[N - 1];

    double spread = 0.0;
    for (std::size_t i = 0; i <= N; ++i)
      for (std::size_t k = 0; k < N; ++k) spread = std::max(spread, std::abs(v[i][k] - v[best][k]));
    out.iterations = it;
    if (spread < tol) {
      out.converged = true;
      break;
    }

    Point<N> centroid{};
    for (std::size_t i = 0; i <= N; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < N; ++k) centroid[k] += v[i][k] / static_cast<double>(N);
    }

    const Point<N> reflected = along(v[worst], centroid, 2.0);
    const double fr = f(reflected);
    if (fr < fv[best]) {
      const Point<N> expanded = along(v[worst], centroid, 3.0);
      const double fe = f(expanded);
      if (fe < fr) {
        v[worst] = expanded, fv[worst] = fe;
      } else {
        v[worst] = reflected, fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      v[worst] = reflected, fv[worst] = fr;
      continue;
    }
    // Contract toward the better of the worst vertex and its reflection.
    const bool outside = fr < fv[worst];
    const Point<N> contracted = outside ? along(centroid, reflected, 0.5) : along(centroid, v[worst], 0.5);
    const double fc = f(contracted);
    if (fc < (outside ? fr : fv[worst])) {
      v[worst] = contracted, fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= N; ++i) {
      if (i == best) continue;
      v[i] = along(v[best], v[i], 0.5);
      fv[i] = f(v[i]);
    }
  }
  const std::size_t best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  out.x = v[best];
  out.value = fv[best];
  return out;
}

/// Radical inverse of `index` in `base`, the Halton coordinate.
inline double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

/// Point `index` (from 1) of the Halton sequence in bases 2, 3, 5, 7 scaled to [0, 2π)^4.
inline Point<4> halton_angles(std::uint64_t index) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return {two_pi * radical_inverse(index, 2), two_pi * radical_inverse(index, 3),
          two_pi * radical_inverse(index, 5), two_pi * radical_inverse(index, 7)};
}

struct OptimizationResult {
  double best_value = 0.0;
  ChshSettings settings{};
  int starts_used = 0;
  bool converged = false;
  // The same settings evaluated through the joint-table route.
  double table_value = 0.0;
};

struct OptimizeOptions {
  int starts = kDefaultStarts;
  double tol = kDefaultSimplexTolerance;
  double initial_step = 0.5;
  unsigned threads = 0;
};

/// Multistart Nelder-Mead on the closed-form CHSH value. Extra starts (e.g. a
/// warm start) run before the Halton points and win ties.
inline OptimizationResult maximize_chsh(const DetectorModel& model, const OptimizeOptions& opts = {},
                                        std::span<const ChshSettings> extra_starts = {}) {
  model.validate();
  if (opts.starts < 1) throw error(errc::bad_argument, "starts must be at least 1");
  if (!(opts.tol > 0.0)) throw error(errc::bad_argument, "tolerance must be positive");

  std::vector<Point<4>> starts;
  for (const auto& s : extra_starts) starts.push_back(s.as_array());
  for (int i = 1; i <= opts.starts; ++i) starts.push_back(halton_angles(static_cast<std::uint64_t>(i)));

  auto objective = [&model](const Point<4>& x) { return -chsh(ChshSettings::from_array(x), model); };
  std::vector<SimplexResult<4>> runs(starts.size());
  parallel_for(starts.size(), opts.threads,
               [&](std::size_t i) { runs[i] = nelder_mead<4>(objective, starts[i], opts.initial_step, opts.tol); });

  std::size_t best = 0;
  bool any_converged = false;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    any_converged = any_converged || runs[i].converged;
    if (runs[i].value < runs[best].value) best = i;
  }
  if (!any_converged) throw error(errc::no_convergence, "no start reached the simplex tolerance");

  OptimizationResult r;
  r.settings = ChshSettings::from_array(runs[best].x).canonical();
  r.best_value = chsh(r.settings, model);
  r.table_value = chsh(r.settings, model, Route::table);
  r.starts_used = static_cast<int>(starts.size());
  r.converged = runs[best].converged;
  return r;
}

inline OptimizationResult maximize_chsh(const DetectorModel& model, int starts, double tol) {
  OptimizeOptions opts;
  opts.starts = starts;
  opts.tol = tol;
  return maximize_chsh(model, opts);
}

struct ThresholdResult {
  double alpha = 0.0;
  double eta_critical = 0.0;
  ChshSettings settings_at_threshold{};
  double bracket_width = 0.0;
  // Bracket ends after bisection: no violation at lower, violation at upper.
  double eta_lower = 0.0;
  double eta_upper = 0.0;
};

inline constexpr double kLocalRealismBound = 2.0;

/// Smallest efficiency in [0.5, 1] at which the maximal CHSH value exceeds 2,
/// by bisection with each inner maximization warm-started from the last
/// violating settings.
inline ThresholdResult critical_efficiency(double alpha, double tol = kDefaultEfficiencyTolerance,
                                           const OptimizeOptions& opts = {}) {
  check_alpha(alpha);
  if (!(tol > 0.0)) throw error(errc::bad_argument, "tolerance must be positive");

  double lo = 0.5, hi = 1.0;
  OptimizationResult at_hi = maximize_chsh({alpha, hi}, opts);
  if (at_hi.best_value <= kLocalRealismBound) {
    throw error(errc::no_violation, "no CHSH violation even with perfect detectors");
  }
  std::array<ChshSettings, 1> warm{at_hi.settings};
  if (maximize_chsh({alpha, lo}, opts, warm).best_value > kLocalRealismBound) {
    throw error(errc::bad_argument, "violation persists at the lower end of the efficiency bracket");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const OptimizationResult r = maximize_chsh({alpha, mid}, opts, warm);
    if (r.best_value > kLocalRealismBound) {
      hi = mid;
      warm[0] = r.settings;
    } else {
      lo = mid;
    }
  }
  ThresholdResult out;
  out.alpha = alpha;
  out.eta_critical = 0.5 * (lo + hi);
  out.settings_at_threshold = warm[0];
  out.bracket_width = hi - lo;
  out.eta_lower = lo;
  out.eta_upper = hi;
  return out;
}

}  // namespace bellsim
