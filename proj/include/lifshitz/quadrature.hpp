#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lifshitz::quad {

struct Tolerance {
  double abs = 1e-8;
  double rel = 1e-8;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
};

using Integrand = std::function<double(double)>;

// Adaptive 15-point Gauss-Kronrod on [a, b]. Throws QuadratureError when the
// error estimate stays above max(tol.abs, tol.rel * |value|).
Result integrate(const Integrand& f, double a, double b, Tolerance tol = {});

// Same, integrating panel by panel over consecutive breakpoints.
Result integrate_panels(const Integrand& f, std::span<const double> breaks, Tolerance tol = {});

// n log-spaced points spanning [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

// Breakpoints for [lo, hi] with roughly `per_decade` log-spaced panels per decade.
std::vector<double> log_panels(double lo, double hi, double per_decade = 4.0);

}  // namespace lifshitz::quad
