#pragma once

// Small numeric building blocks shared by the optimizers: 1-D search,
// monotone root bracketing, quadrature and grid reductions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <omp.h>

namespace tandem {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// n evenly spaced points covering [lo, hi] inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

struct Maximum {
  double x = 0.0;
  double value = -kInf;
};

/// Golden-section search for a maximum of a unimodal f on [lo, hi].
template <class F>
Maximum golden_section_max(F&& f, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    if (c >= d) break;  // interval collapsed to rounding
  }
  return fc >= fd ? Maximum{c, fc} : Maximum{d, fd};
}

// Coordinate ascent over a few scalar coordinates. `coords` are modified in
// place; `lower(i)`/`upper(i)` give the feasible range of coordinate i given
// the others; `objective()` reads the coordinates. Infinite coordinates are
// left where they are.
template <class Objective, class Lower, class Upper>
double coordinate_ascent(const std::vector<double*>& coords, double step, int sweeps, double tol,
                         Objective&& objective, Lower&& lower, Upper&& upper) {
  double best = objective();
  std::vector<double> h(coords.size(), step);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double gained = 0.0;
    bool active = false;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      double& x = *coords[i];
      if (!std::isfinite(x) || h[i] < tol) continue;
      active = true;
      const double lo = std::max(x - h[i], lower(i));
      const double hi = std::min(x + h[i], upper(i));
      const double x0 = x;
      if (!(lo < hi)) {
        h[i] *= 0.5;
        continue;
      }
      const Maximum m = golden_section_max(
          [&](double t) {
            x = t;
            return objective();
          },
          lo, hi, tol);
      if (m.value > best) {
        gained += m.value - best;
        best = m.value;
        x = m.x;
        // Keep the bracket while the maximum sits at its edge.
        if (std::abs(x - x0) < 0.9 * h[i]) h[i] = std::max(0.5 * h[i], 4.0 * std::abs(x - x0));
      } else {
        x = x0;
        h[i] *= 0.5;
      }
    }
    if (!active) break;
    if (gained == 0.0 && std::all_of(h.begin(), h.end(), [&](double v) {
          return v < tol;
        })) {
      break;
    }
  }
  objective();  // leave the caller's state consistent with the coordinates
  return best;
}

/// Root of a monotone (either direction) continuous g on [lo, hi] with
/// g(lo), g(hi) of opposite sign; bisects until the bracket stops shrinking.
/// Returns the endpoint with the smaller |g|.
template <class G>
double bisect_root(G&& g, double lo, double hi, int max_iter = 200) {
  double g_lo = g(lo);
  double g_hi = g(hi);
  if (g_lo == 0.0) return lo;
  if (g_hi == 0.0) return hi;
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g_mid = g(mid);
    if (g_mid == 0.0) return mid;
    if ((g_mid < 0.0) == (g_lo < 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
      g_hi = g_mid;
    }
  }
  return std::abs(g_lo) <= std::abs(g_hi) ? lo : hi;
}

/// Adaptive 61-point Gauss-Kronrod on [a, b]; either end may be infinite.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-12) {
  if (!(a < b)) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      std::forward<F>(f), a, b, 30, abs_tol, &error, &l1);
}

// ---------------------------------------------------------------------------
// Grid reductions. Both kernels fill the score vector and then reduce it
// serially in index order, so the winner is identical for any thread count.
// Ties go to the smallest index; NaN scores never win.

struct GridBest {
  std::size_t index = 0;
  double value = -kInf;
};

namespace detail {
inline GridBest reduce_scores(const std::vector<double>& scores) {
  GridBest best;
  bool found = false;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = scores[i];
    if (std::isnan(s)) continue;
    if (!found || s > best.value) {
      best = {i, s};
      found = true;
    }
  }
  return best;
}
}  // namespace detail

/// Reference implementation, one thread.
template <class F>
std::vector<double> grid_scores_serial(std::size_t n, F&& score) {
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) scores[i] = score(i);
  return scores;
}

/// OpenMP implementation; `score` must be safe to call concurrently.
template <class F>
std::vector<double> grid_scores_parallel(std::size_t n, F&& score) {
  std::vector<double> scores(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) scores[static_cast<std::size_t>(i)] = score(static_cast<std::size_t>(i));
  return scores;
}

template <class F>
GridBest grid_argmax_serial(std::size_t n, F&& score) {
  return detail::reduce_scores(grid_scores_serial(n, std::forward<F>(score)));
}

template <class F>
GridBest grid_argmax_parallel(std::size_t n, F&& score) {
  return detail::reduce_scores(grid_scores_parallel(n, std::forward<F>(score)));
}

/// Indices of the `k` best scores, best first; ties by smaller index.
std::vector<std::size_t> top_indices(const std::vector<double>& scores, std::size_t k);

}  // namespace tandem
