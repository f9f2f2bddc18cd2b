#include "lifshitz/casimir.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "lifshitz/constants.hpp"
#include "lifshitz/errors.hpp"

namespace lifshitz::casimir {

namespace {

using constants::kPi;

const double kPrefactor = 15.0 / (2.0 * std::pow(kPi, 4));
// e^{-K} < 1e-12 beyond this point.
const double kKMax = 12.0 * std::log(10.0);

// r_s^2/(e^K - r_s^2) + r_p^2/(e^K - r_p^2) at K = 2 kappa L, u = zeta/(c kappa).
// The denominators use expm1(K) + (1 - r^2) to stay accurate as K -> 0 and r -> 1.
double polar_summand(double eps, double K, double u) {
  const double w = std::sqrt(1.0 + (eps - 1.0) * u * u);
  const double em1 = std::expm1(K);
  const double rs = (1.0 - w) / (1.0 + w);
  const double rp = (eps - w) / (eps + w);
  const double one_rs = 4.0 * w / ((1.0 + w) * (1.0 + w));
  const double one_rp = 4.0 * eps * w / ((eps + w) * (eps + w));
  return rs * rs / (em1 + one_rs) + rp * rp / (em1 + one_rp);
}

struct KRange {
  double lo;
  double hi;
};

KRange k_range(double L, const ForceOptions& opt) {
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("separation must be positive");
  if (!(opt.span_lo > 0.0) || !(opt.span_hi > opt.span_lo)) {
    throw DomainError("integration span needs 0 < lo < hi");
  }
  const double zch = characteristic_frequency(L);
  const KRange r{opt.span_lo / zch, std::min(opt.span_hi / zch, kKMax)};
  if (!(r.hi > r.lo)) throw DomainError("integration span is empty at this separation");
  return r;
}

quad::Tolerance inner_tol(const ForceOptions& opt) { return {opt.tol.abs * 1e-3, opt.tol.rel * 1e-2}; }

// `kinks` are zeta values (eV) where eps(i zeta) has a slope discontinuity;
// they become panel edges of the inner integral.
EtaResult eta_polar(const EpsFunction& eps, std::span<const double> kinks, double L, const ForceOptions& opt) {
  const KRange kr = k_range(L, opt);
  const double zch = characteristic_frequency(L);
  const quad::Tolerance itol = inner_tol(opt);

  auto inner = [&](double K) {
    std::vector<double> br{0.0, 1e-3, 1e-2, 0.1, 0.3, 1.0};
    const double zmax = K * zch;
    const auto lo = std::lower_bound(kinks.begin(), kinks.end(), 1e-3 * zmax);
    const auto hi = std::lower_bound(kinks.begin(), kinks.end(), zmax);
    for (auto it = lo; it != hi; ++it) br.push_back(*it / zmax);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    auto f = [&](double u) { return polar_summand(eps(K * u * zch), K, u); };
    return quad::integrate_panels(f, br, itol).value;
  };
  auto outer = [&](double K) { return K * K * K * inner(K); };

  const auto panels = quad::log_panels(kr.lo, kr.hi, 4.0);
  const quad::Result r = quad::integrate_panels(outer, panels, opt.tol);

  EtaResult out;
  out.L = L;
  out.eta = kPrefactor * r.value;
  out.force = out.eta * force_ideal(L);
  out.quad_err = r.value != 0.0 ? r.error / std::abs(r.value) : r.error;
  return out;
}

template <class Fn>
std::vector<EtaResult> map_distances(std::span<const double> Ls, bool parallel, Fn fn) {
  std::vector<EtaResult> out(Ls.size());
  if (!parallel || Ls.size() < 2) {
    for (std::size_t i = 0; i < Ls.size(); ++i) out[i] = fn(Ls[i]);
    return out;
  }
  std::vector<std::future<EtaResult>> jobs;
  jobs.reserve(Ls.size());
  for (double L : Ls) jobs.push_back(std::async(std::launch::async, fn, L));
  for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = jobs[i].get();
  return out;
}

bool use_cache(const MirrorSpec& m, const ForceOptions& opt) {
  switch (opt.cache) {
    case CachePolicy::always: return true;
    case CachePolicy::never: return false;
    case CachePolicy::automatic: break;
  }
  return m.expensive();
}

kk::KkOptions kk_options(const ForceOptions& opt) { return kk::KkOptions{opt.tol}; }

}  // namespace

// ---------------------------------------------------------------------------

MirrorSpec MirrorSpec::drude(const drude::DrudeParams& p, std::string label) {
  p.validate();
  return {p, std::move(label)};
}

MirrorSpec MirrorSpec::model(std::shared_ptr<const kk::DielectricModel> m, std::string label) {
  if (!m) throw DomainError("MirrorSpec: null dielectric model");
  return {std::move(m), std::move(label)};
}

MirrorSpec MirrorSpec::function(EpsFunction f, std::string label) {
  if (!f) throw DomainError("MirrorSpec: empty eps function");
  return {std::move(f), std::move(label)};
}

MirrorSpec MirrorSpec::constant(double eps, std::string label) {
  if (!(eps >= 1.0) || !std::isfinite(eps)) throw DomainError("MirrorSpec: constant eps must be >= 1");
  return function([eps](double) { return eps; }, std::move(label));
}

double MirrorSpec::eps(double zeta, const kk::KkOptions& kk_opt) const {
  const double v = std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, drude::DrudeParams>) {
          return drude::eps_imag_axis_closed(p, zeta);
        } else if constexpr (std::is_same_v<T, EpsFunction>) {
          return p(zeta);
        } else {
          return kk::kk_imag_axis(*p, zeta, kk_opt);
        }
      },
      provider);
  if (!(v >= 1.0)) {
    throw DomainError("mirror '" + label + "' returned eps(i zeta) < 1 at zeta = " + std::to_string(zeta));
  }
  return v;
}

bool MirrorSpec::expensive() const noexcept {
  return std::holds_alternative<std::shared_ptr<const kk::DielectricModel>>(provider);
}

ReflectionSq reflection_sq(double eps, double zeta, double k) {
  if (!(eps >= 1.0)) throw DomainError("reflection_sq: eps must be >= 1");
  if (!(zeta > 0.0)) throw DomainError("reflection_sq: zeta must be positive");
  if (!(k >= 0.0)) throw DomainError("reflection_sq: k must be >= 0");
  const double q = constants::ev_to_rad_per_s(zeta) / constants::kSpeedOfLight;  // 1/m
  const double kappa = std::sqrt(k * k + q * q);
  const double s = std::sqrt(k * k + eps * q * q);
  const double rs = (kappa - s) / (kappa + s);
  const double rp = (s - eps * kappa) / (s + eps * kappa);
  return {rs * rs, rp * rp};
}

double force_ideal(double L) {
  if (!(L > 0.0)) throw DomainError("force_ideal: L must be positive");
  return -kPi * kPi * constants::kHbar * constants::kSpeedOfLight / (240.0 * std::pow(L, 4));
}

double characteristic_frequency(double L) {
  if (!(L > 0.0)) throw DomainError("characteristic_frequency: L must be positive");
  return constants::rad_per_s_to_ev(constants::kSpeedOfLight / (2.0 * L));
}

// ---------------------------------------------------------------------------

EpsCache::EpsCache(const MirrorSpec& mirror, double zeta_lo, double zeta_hi, std::size_t n,
                   const kk::KkOptions& kk_opt, bool parallel) {
  if (n < 2) throw DomainError("EpsCache needs at least 2 points");
  const auto grid = quad::log_grid(zeta_lo, zeta_hi, n);
  log_zeta_.resize(n);
  log_chi_.resize(n);
  auto fill = [&](std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) {
      const double chi = mirror.eps(grid[i], kk_opt) - 1.0;
      if (!(chi > 0.0)) throw DomainError("EpsCache: eps(i zeta) must exceed 1");
      log_zeta_[i] = std::log(grid[i]);
      log_chi_[i] = std::log(chi);
    }
  };
  const std::size_t workers = parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1;
  if (workers == 1) {
    fill(0, n);
    return;
  }
  std::vector<std::future<void>> jobs;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t from = 0; from < n; from += chunk) {
    jobs.push_back(std::async(std::launch::async, fill, from, std::min(n, from + chunk)));
  }
  for (auto& j : jobs) j.get();
}

double EpsCache::operator()(double zeta) const {
  const double x = std::log(zeta);
  auto it = std::upper_bound(log_zeta_.begin(), log_zeta_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - log_zeta_.begin());
  i = std::clamp<std::size_t>(i, 1, log_zeta_.size() - 1);
  const double t = (x - log_zeta_[i - 1]) / (log_zeta_[i] - log_zeta_[i - 1]);
  return 1.0 + std::exp(log_chi_[i - 1] + t * (log_chi_[i] - log_chi_[i - 1]));
}

// ---------------------------------------------------------------------------

EtaResult reduction_factor(const EpsFunction& eps, double L, const ForceOptions& opt) {
  return eta_polar(eps, {}, L, opt);
}

EtaResult reduction_factor(const MirrorSpec& mirror, double L, const ForceOptions& opt) {
  const double Ls[] = {L};
  return reduction_factors(mirror, Ls, opt).front();
}

double force_lifshitz(const MirrorSpec& mirror, double L, const ForceOptions& opt) {
  return reduction_factor(mirror, L, opt).force;
}

std::vector<EtaResult> reduction_factors(const MirrorSpec& mirror, std::span<const double> Ls,
                                         const ForceOptions& opt) {
  const kk::KkOptions kopt = kk_options(opt);
  if (!use_cache(mirror, opt)) {
    const EpsFunction eps = [&](double z) { return mirror.eps(z, kopt); };
    return map_distances(Ls, opt.parallel, [&](double L) { return eta_polar(eps, {}, L, opt); });
  }

  std::vector<EtaResult> prev;
  std::size_t n = opt.cache_points;
  for (int level = 0;; ++level) {
    const EpsCache cache(mirror, opt.span_lo, opt.span_hi, n, kopt, opt.parallel);
    std::vector<double> kinks(cache.size());
    const auto grid = quad::log_grid(opt.span_lo, opt.span_hi, n);
    std::copy(grid.begin(), grid.end(), kinks.begin());
    const EpsFunction eps = [&](double z) { return cache(z); };
    auto cur = map_distances(Ls, opt.parallel, [&](double L) { return eta_polar(eps, kinks, L, opt); });

    if (!prev.empty()) {
      double change = 0.0;
      for (std::size_t i = 0; i < cur.size(); ++i) change = std::max(change, std::abs(cur[i].eta - prev[i].eta));
      if (change < opt.cache_tol || level >= opt.cache_max_doublings) {
        // The last doubling step bounds the interpolation error.
        for (std::size_t i = 0; i < cur.size(); ++i) {
          cur[i].quad_err += std::abs(cur[i].eta - prev[i].eta) / cur[i].eta;
        }
        return cur;
      }
    }
    prev = std::move(cur);
    n *= 2;
  }
}

EtaResult reduction_factor_direct(const MirrorSpec& mirror, double L, const ForceOptions& opt) {
  const KRange kr = k_range(L, opt);
  const double zch = characteristic_frequency(L);
  const quad::Tolerance itol = inner_tol(opt);
  const kk::KkOptions kopt = kk_options(opt);

  // x = zeta / zeta_ch, q = 2 k L, K = sqrt(x^2 + q^2); same disk kr.lo <= K <= kr.hi.
  auto inner = [&](double x) {
    const double zeta = x * zch;
    const double eps = mirror.eps(zeta, kopt);
    const double q_lo = x < kr.lo ? std::sqrt(kr.lo * kr.lo - x * x) : 0.0;
    const double q_hi = std::sqrt(kr.hi * kr.hi - x * x);
    auto f = [&](double q) {
      const ReflectionSq r = reflection_sq(eps, zeta, q / (2.0 * L));
      const double K = std::hypot(x, q);
      const double eK = std::exp(K);
      return q * K * (r.rs_sq / (eK - r.rs_sq) + r.rp_sq / (eK - r.rp_sq));
    };
    std::vector<double> br{q_lo};
    for (double b : {1e-3, 1e-2, 0.1, 1.0, 3.0, 10.0}) {
      if (b > q_lo && b < q_hi) br.push_back(b);
    }
    br.push_back(q_hi);
    return quad::integrate_panels(f, br, itol).value;
  };

  std::vector<double> xb{0.0};
  for (double b : quad::log_panels(kr.lo, kr.hi, 4.0)) xb.push_back(b);
  const quad::Result r = quad::integrate_panels(inner, xb, opt.tol);

  EtaResult out;
  out.L = L;
  out.eta = kPrefactor * r.value;
  out.force = out.eta * force_ideal(L);
  out.quad_err = r.value != 0.0 ? r.error / std::abs(r.value) : r.error;
  return out;
}

}  // namespace lifshitz::casimir
