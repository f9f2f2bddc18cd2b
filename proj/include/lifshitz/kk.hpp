#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lifshitz/drude.hpp"
#include "lifshitz/quadrature.hpp"
#include "lifshitz/spectra.hpp"

namespace lifshitz::kk {

// How eps'' is continued outside the tabulated range: Drude below omega_c,
// C / omega^3 above omega_max. Without `low`, eps'' is zero below omega_c.
struct ExtrapolationScheme {
  std::optional<drude::DrudeParams> low;
  double omega_c = 0.0;
  double high_coeff = 0.0;
  double omega_max = 0.0;
};

// eps''(omega) over the whole positive axis: Drude head, smoothed data, cubic tail.
class DielectricModel {
 public:
  // `mid` must cover [omega_c, omega_max]. high_coeff is taken as given.
  DielectricModel(ExtrapolationScheme scheme, spectra::SmoothedCurve mid);

  // Builds the smoothed eps'' curve from the table points at or above omega_c.
  // omega_c snaps up to the first tabulated frequency >= the requested value,
  // omega_max is the last tabulated frequency and C = eps''(omega_max) omega_max^3.
  static DielectricModel from_table(const spectra::SpectralTable& table,
                                    std::optional<drude::DrudeParams> low, double omega_c,
                                    const spectra::SmoothingOptions& smoothing = {});

  const ExtrapolationScheme& scheme() const noexcept { return scheme_; }
  const spectra::SmoothedCurve& mid() const noexcept { return mid_; }
  double omega_c() const noexcept { return scheme_.omega_c; }
  double omega_max() const noexcept { return scheme_.omega_max; }

  // eps'' at real frequency omega (clamped at zero inside the data range).
  double eps_im(double omega) const;

  // Same model with a different low-frequency extrapolation.
  DielectricModel with_low(std::optional<drude::DrudeParams> low) const;

  // Data-quality notes: eps'' jumps by more than 5% at omega_c or omega_max,
  // or the smoothed data dips below zero.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  void check_continuity();

  ExtrapolationScheme scheme_;
  spectra::SmoothedCurve mid_;
  std::vector<std::string> warnings_;
};

struct KkOptions {
  quad::Tolerance tol{1e-8, 1e-8};
};

// eps'(omega) = 1 + (2/pi) PV int_0^inf x eps''(x) / (x^2 - omega^2) dx.
double kk_real_from_imag(const DielectricModel& model, double omega, const KkOptions& opt = {});

// eps(i zeta) = 1 + (2/pi) int_0^inf x eps''(x) / (x^2 + zeta^2) dx.
double kk_imag_axis(const DielectricModel& model, double zeta, const KkOptions& opt = {});

// The same integrand restricted to [omega_lo, omega_hi]; omega_hi may be +inf.
double eps_contribution(const DielectricModel& model, double zeta, double omega_lo,
                        double omega_hi, const KkOptions& opt = {});

// Region split of eps(i zeta) - 1: below omega_c, [omega_c, omega_0), [omega_0, inf).
struct RegionSplit {
  double low = 0.0;
  double mid = 0.0;
  double high = 0.0;
};

inline constexpr double kDefaultInterbandEdge = 2.45;  // eV, Au

RegionSplit eps_regions(const DielectricModel& model, double zeta,
                        double omega_0 = kDefaultInterbandEdge, const KkOptions& opt = {});

// ---------------------------------------------------------------------------
// Drude parameters from Kramers-Kronig consistency of eps'.

struct KkEstimateOptions {
  spectra::SmoothingOptions smoothing{};
  KkOptions kk{};
  // Only eps' data in (omega_c, fit_omega_max] enter the objective.
  double fit_omega_max = std::numeric_limits<double>::infinity();
  std::optional<drude::DrudeParams> init;
  int max_iter = 2000;
  double simplex_tol = 1e-6;
};

struct KkEstimate {
  drude::DrudeParams params;
  double omega_c = 0.0;      // after snapping to the grid
  double objective = 0.0;    // sum of squared eps' deviations
  std::size_t n_points = 0;
  int iterations = 0;
  std::vector<std::string> warnings;
};

KkEstimate estimate_drude_kk_report(const spectra::SpectralTable& table, double omega_c,
                                    const KkEstimateOptions& opt = {});

drude::DrudeParams estimate_drude_kk(const spectra::SpectralTable& table, double omega_c,
                                     const KkEstimateOptions& opt = {});

// Per-point comparison of tabulated eps' with the KK prediction.
struct KkCheckRow {
  double omega = 0.0;
  double eps_re_data = 0.0;
  double eps_re_kk = 0.0;
  double rel_dev = 0.0;
};

std::vector<KkCheckRow> kk_check(const DielectricModel& model, const spectra::SpectralTable& table,
                                 const KkOptions& opt = {});

}  // namespace lifshitz::kk
