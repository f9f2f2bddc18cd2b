#pragma once

// Derivative-free simplex minimizer used by the KK parameter estimation.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace lifshitz::detail {

template <std::size_t N>
struct SimplexResult {
  std::array<double, N> x{};
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead with the standard coefficients (1, 2, 0.5, 0.5). Stops when every
// vertex lies within `tol` of the best one, relative per coordinate.
template <std::size_t N>
SimplexResult<N> nelder_mead(const std::function<double(const std::array<double, N>&)>& f,
                             const std::array<double, N>& start, const std::array<double, N>& step,
                             double tol, int max_iter) {
  using Point = std::array<double, N>;
  std::array<Point, N + 1> pts{};
  std::array<double, N + 1> val{};
  pts[0] = start;
  for (std::size_t i = 0; i < N; ++i) {
    pts[i + 1] = start;
    pts[i + 1][i] += step[i];
  }
  for (std::size_t i = 0; i <= N; ++i) val[i] = f(pts[i]);

  SimplexResult<N> res;
  std::array<std::size_t, N + 1> order{};
  for (int it = 0; it < max_iter; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    const Point& best = pts[order[0]];

    double size = 0.0;
    for (std::size_t v = 1; v <= N; ++v) {
      for (std::size_t i = 0; i < N; ++i) {
        size = std::max(size, std::abs(pts[order[v]][i] - best[i]) / (std::abs(best[i]) + 1e-3));
      }
    }
    res.iterations = it;
    if (size < tol) {
      res.converged = true;
      break;
    }

    Point centroid{};
    for (std::size_t v = 0; v < N; ++v) {
      for (std::size_t i = 0; i < N; ++i) centroid[i] += pts[order[v]][i] / static_cast<double>(N);
    }
    const std::size_t worst = order[N];
    auto along = [&](double t) {
      Point p{};
      for (std::size_t i = 0; i < N; ++i) p[i] = centroid[i] + t * (pts[worst][i] - centroid[i]);
      return p;
    };

    const Point xr = along(-1.0);
    const double fr = f(xr);
    if (fr < val[order[0]]) {
      const Point xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[order[N - 1]]) {
      pts[worst] = xr;
      val[worst] = fr;
      continue;
    }
    const bool outside = fr < val[worst];
    const Point xc = along(outside ? -0.5 : 0.5);
    const double fc = f(xc);
    if (fc < (outside ? fr : val[worst])) {
      pts[worst] = xc;
      val[worst] = fc;
      continue;
    }
    // Shrink towards the best vertex.
    for (std::size_t v = 1; v <= N; ++v) {
      Point& p = pts[order[v]];
      for (std::size_t i = 0; i < N; ++i) p[i] = best[i] + 0.5 * (p[i] - best[i]);
      val[order[v]] = f(p);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
  res.x = pts[best];
  res.value = val[best];
  return res;
}

}  // namespace lifshitz::detail
