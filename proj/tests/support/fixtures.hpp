#pragma once

// Synthetic optical data and independent reference evaluators for the tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lifshitz/casimir.hpp"
#include "lifshitz/constants.hpp"
#include "lifshitz/drude.hpp"
#include "lifshitz/quadrature.hpp"
#include "lifshitz/spectra.hpp"

namespace fixtures {

using lifshitz::drude::DrudeParams;
using lifshitz::spectra::Permittivity;
using lifshitz::spectra::SpectralPoint;
using lifshitz::spectra::SpectralTable;

inline DrudeParams drude(double wp, double wt, double pol = 1.0) { return {wp, wt, pol, {}, {}, {}}; }

// Plain Drude pair written out again here so tests do not lean on the library.
inline Permittivity drude_eps(const DrudeParams& p, double w) {
  const double d = w * w + p.omega_tau * p.omega_tau;
  return {p.pol - p.omega_p * p.omega_p / d, p.omega_p * p.omega_p * p.omega_tau / (w * d)};
}

// A w0^2 / (w0^2 - w^2 - i g w)
struct Lorentz {
  double strength;
  double omega_0;
  double gamma;

  Permittivity at(double w) const {
    const double a = omega_0 * omega_0 - w * w;
    const double den = a * a + gamma * gamma * w * w;
    const double s = strength * omega_0 * omega_0;
    return {s * a / den, s * gamma * w / den};
  }
};

inline std::vector<double> log_points(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return out;
}

template <class Eps>
SpectralTable table_from(Eps eps, double lo, double hi, std::size_t n) {
  std::vector<SpectralPoint> pts;
  for (double w : log_points(lo, hi, n)) {
    const Permittivity e = eps(w);
    pts.push_back({w, e.re, e.im});
  }
  return SpectralTable(std::move(pts));
}

inline SpectralTable drude_table(const DrudeParams& p, double lo, double hi, std::size_t n) {
  return table_from([&](double w) { return drude_eps(p, w); }, lo, hi, n);
}

inline SpectralTable drude_lorentz_table(const DrudeParams& p, const Lorentz& l, double lo, double hi,
                                         std::size_t n) {
  return table_from(
      [&](double w) {
        const Permittivity d = drude_eps(p, w);
        const Permittivity o = l.at(w);
        return Permittivity{d.re + o.re, d.im + o.im};
      },
      lo, hi, n);
}

// Gold-like dielectric function: a Drude term plus five interband Lorentz terms
// (Lorentz-Drude parameter set of Rakic et al. 1998, oscillator strengths scaled
// by a 9.03 eV plasma frequency).
struct GoldSurrogate {
  DrudeParams free{7.50, 0.061, 1.0, {}, {}, {}};

  Permittivity at(double w) const {
    static const double kWp = 9.03;
    static const double kOsc[5][3] = {
        {0.024, 0.241, 0.415}, {0.010, 0.345, 0.830}, {0.071, 0.870, 2.969},
        {0.601, 2.494, 4.304}, {4.384, 2.214, 13.32},
    };
    Permittivity e = drude_eps(free, w);
    for (const auto& o : kOsc) {
      const double a = o[2] * o[2] - w * w;
      const double den = a * a + w * w * o[1] * o[1];
      e.re += o[0] * kWp * kWp * a / den;
      e.im += o[0] * kWp * kWp * w * o[1] / den;
    }
    return e;
  }

  SpectralTable table(double lo = 0.125, double hi = 9000.0, std::size_t n = 200) const {
    return table_from([this](double w) { return at(w); }, lo, hi, n);
  }
};

// Reduction factor by brute force: trapezoid rule on a log grid in x = zeta/zeta_ch
// and q = 2kL, using the physical reflection amplitudes. Independent of the
// library's polar substitution and adaptive quadrature.
template <class Eps>
double eta_trapezoid(Eps eps, double L, std::size_t n = 200) {
  const double c = lifshitz::constants::kSpeedOfLight;
  const double zch = c / (2.0 * L) / lifshitz::constants::kRadPerSecondPerEv;
  const double lo = 1e-5;
  const double hi = 40.0;
  const auto g = log_points(lo, hi, n);
  // Uniform steps in log x: weight x * dlnx, halved at both ends. The integrand
  // vanishes at both ends of the grid, where this rule converges very fast.
  const double dl = std::log(hi / lo) / static_cast<double>(n - 1);
  auto weights = [&](std::size_t i) { return g[i] * dl * ((i == 0 || i + 1 == n) ? 0.5 : 1.0); };
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g[i];
    const double zeta = x * zch;
    const double e = eps(zeta);
    const double qz = zeta * lifshitz::constants::kRadPerSecondPerEv / c;
    for (std::size_t j = 0; j < n; ++j) {
      const double q = g[j];
      const double k = q / (2.0 * L);
      const double kappa = std::sqrt(k * k + qz * qz);
      const double s = std::sqrt(k * k + e * qz * qz);
      const double rs = (kappa - s) / (kappa + s);
      const double rp = (s - e * kappa) / (s + e * kappa);
      const double K = std::hypot(x, q);
      const double eK = std::exp(K);
      const double f = q * K * (rs * rs / (eK - rs * rs) + rp * rp / (eK - rp * rp));
      sum += weights(i) * weights(j) * f;
    }
  }
  return 15.0 / (2.0 * std::pow(M_PI, 4)) * sum;
}

// Natural cubic spline through (x, y); evaluation by binary search.
class NaturalSpline {
 public:
  NaturalSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    m_.assign(n, 0.0);
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1];
      const double h1 = x_[i + 1] - x_[i];
      const double a = h0 / 6.0;
      const double b = (h0 + h1) / 3.0;
      const double r = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
      const double denom = b - a * c[i - 1];
      c[i] = (h1 / 6.0) / denom;
      d[i] = (r - a * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = d[i] - c[i] * m_[i + 1];
      if (i == 1) break;
    }
  }

  double operator()(double t) const {
    std::size_t i = 1;
    while (i + 1 < x_.size() && x_[i] < t) ++i;
    const double h = x_[i] - x_[i - 1];
    const double a = (x_[i] - t) / h;
    const double b = (t - x_[i - 1]) / h;
    return a * y_[i - 1] + b * y_[i] + ((a * a * a - a) * m_[i - 1] + (b * b * b - b) * m_[i]) * h * h / 6.0;
  }

 private:
  std::vector<double> x_, y_, m_;
};

// Small hand-rolled generator for property tests: fixed seed, uniform and log-uniform draws.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  DrudeParams drude() { return {uniform(5.0, 10.0), log_uniform(0.01, 0.1), 1.0, {}, {}, {}}; }

 private:
  std::mt19937_64 rng_;
};

// 1% noise with one global sigma: 0.01 times the RMS of all eps' and eps'' values.
inline SpectralTable with_global_noise(const SpectralTable& t, double frac, std::uint64_t seed) {
  double ss = 0.0;
  std::size_t n = 0;
  for (const auto& p : t.points()) {
    ss += *p.eps_re * *p.eps_re + *p.eps_im * *p.eps_im;
    n += 2;
  }
  const double sigma = frac * std::sqrt(ss / static_cast<double>(n));
  Gen g(seed);
  std::vector<SpectralPoint> pts;
  for (const auto& p : t.points()) {
    const double re = *p.eps_re + sigma * g.normal();
    const double im = std::max(0.0, *p.eps_im + sigma * g.normal());
    pts.push_back({p.omega, re, im});
  }
  return SpectralTable(std::move(pts));
}

}  // namespace fixtures
