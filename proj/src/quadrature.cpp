#include "lifshitz/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "lifshitz/errors.hpp"

namespace lifshitz::quad {

namespace {

constexpr std::size_t kMaxIntervals = 4000;

// 15-point Kronrod extension of the 7-point Gauss rule (abscissae >= 0).
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kWgk[7];
  double g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    k += kWgk[j] * s;
    if (j % 2 == 1) g += kWg[j / 2] * s;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

// Globally adaptive: the panel with the largest error estimate is bisected until
// the summed estimate meets the tolerance.
Result integrate(const Integrand& f, double a, double b, Tolerance tol) {
  if (a == b) return {};
  std::priority_queue<Piece> heap;
  Piece first = gk15(f, a, b);
  double value = first.value;
  double error = first.error;
  heap.push(first);
  while (error > std::max(tol.abs, tol.rel * std::abs(value))) {
    if (!std::isfinite(value)) break;
    if (heap.size() >= kMaxIntervals) break;
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) || worst.b - worst.a < 1e-15 * std::abs(mid)) break;
    heap.pop();
    const Piece l = gk15(f, worst.a, mid);
    const Piece r = gk15(f, mid, worst.b);
    value += l.value + r.value - worst.value;
    error += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to shed the drift of the running totals.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  if (!std::isfinite(value)) {
    throw QuadratureError("integrand produced a non-finite value", value, error);
  }
  if (error > std::max(tol.abs, tol.rel * std::abs(value))) {
    throw QuadratureError("adaptive Gauss-Kronrod did not converge on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]",
                          value, error);
  }
  return {value, error};
}

Result integrate_panels(const Integrand& f, std::span<const double> breaks, Tolerance tol) {
  Result total;
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    const Result part = integrate(f, breaks[i - 1], breaks[i], tol);
    total.value += part.value;
    total.error += part.error;
  }
  return total;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo)) throw DomainError("log_grid needs 0 < lo <= hi");
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double llo = std::log(lo);
  const double step = (std::log(hi) - llo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(llo + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> log_panels(double lo, double hi, double per_decade) {
  if (lo == hi) return {lo, hi};
  const double decades = std::log10(hi / lo);
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(decades * per_decade)));
  return log_grid(lo, hi, n + 1);
}

}  // namespace lifshitz::quad
