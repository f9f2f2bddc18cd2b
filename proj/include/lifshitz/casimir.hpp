#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lifshitz/drude.hpp"
#include "lifshitz/kk.hpp"
#include "lifshitz/quadrature.hpp"

namespace lifshitz::casimir {

// eps(i zeta) as a function of zeta in eV.
using EpsFunction = std::function<double(double)>;

// Optical response of a mirror on the imaginary axis. Both plates use the same mirror.
struct MirrorSpec {
  std::variant<drude::DrudeParams, std::shared_ptr<const kk::DielectricModel>, EpsFunction> provider;
  std::string label;

  static MirrorSpec drude(const drude::DrudeParams& p, std::string label = {});
  static MirrorSpec model(std::shared_ptr<const kk::DielectricModel> m, std::string label = {});
  static MirrorSpec function(EpsFunction f, std::string label = {});
  static MirrorSpec constant(double eps, std::string label = {});

  // eps(i zeta) straight from the provider. Throws DomainError if it is < 1.
  double eps(double zeta, const kk::KkOptions& kk_opt = {}) const;

  // True for providers backed by KK integrals, which are worth caching.
  bool expensive() const noexcept;
};

enum class CachePolicy { automatic, always, never };

struct ForceOptions {
  // Span of c*kappa (the largest imaginary frequency reachable at a given
  // transverse momentum), eV.
  double span_lo = 1e-4;
  double span_hi = 1e3;
  quad::Tolerance tol{1e-8, 1e-8};
  CachePolicy cache = CachePolicy::automatic;
  std::size_t cache_points = 200;
  double cache_tol = 1e-6;  // grid is doubled until eta moves less than this
  int cache_max_doublings = 6;
  bool parallel = true;
};

struct EtaResult {
  double L = 0.0;         // m
  double eta = 0.0;       // F / F_ideal
  double force = 0.0;     // Pa, negative = attractive
  double quad_err = 0.0;  // relative
};

// Squared Fresnel amplitudes at imaginary frequency. zeta in eV, k in 1/m.
struct ReflectionSq {
  double rs_sq = 0.0;
  double rp_sq = 0.0;
};
ReflectionSq reflection_sq(double eps, double zeta, double k);

// -pi^2 hbar c / (240 L^4), Pa.
double force_ideal(double L);

// c / 2L in eV.
double characteristic_frequency(double L);

// Tabulated eps(i zeta): log grid, log(eps - 1) interpolated linearly in log zeta,
// extrapolated linearly in the same variables outside the grid.
class EpsCache {
 public:
  EpsCache(const MirrorSpec& mirror, double zeta_lo, double zeta_hi, std::size_t n,
           const kk::KkOptions& kk_opt = {}, bool parallel = true);
  double operator()(double zeta) const;
  std::size_t size() const noexcept { return log_zeta_.size(); }

 private:
  std::vector<double> log_zeta_;
  std::vector<double> log_chi_;
};

// eta for an arbitrary eps(i zeta), in the variables K = 2 kappa L, u = zeta / (c kappa).
EtaResult reduction_factor(const EpsFunction& eps, double L, const ForceOptions& opt = {});

EtaResult reduction_factor(const MirrorSpec& mirror, double L, const ForceOptions& opt = {});
double force_lifshitz(const MirrorSpec& mirror, double L, const ForceOptions& opt = {});

// Several separations at once; the eps cache is shared and results keep input order.
std::vector<EtaResult> reduction_factors(const MirrorSpec& mirror, std::span<const double> Ls,
                                         const ForceOptions& opt = {});

// Same quantity integrated over (zeta, k) through reflection_sq, without the polar
// substitution. Slower; used to cross-check reduction_factor.
EtaResult reduction_factor_direct(const MirrorSpec& mirror, double L, const ForceOptions& opt = {});

}  // namespace lifshitz::casimir
