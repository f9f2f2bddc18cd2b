#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lifshitz/casimir.hpp"
#include "lifshitz/drude.hpp"
#include "lifshitz/spectra.hpp"

namespace lifshitz::fitting {

struct FitConfig {
  double omega_min = 0.0;  // eV; 0 means the table minimum
  double omega_max = 1.0;  // eV
  std::optional<drude::DrudeParams> init;
  int max_iter = 200;
  double tol = 1e-12;  // relative change of chi^2 between accepted steps
};

struct Residual {
  double omega = 0.0;
  double d_re = 0.0;  // model - data
  double d_im = 0.0;
};

struct FitReport {
  drude::DrudeParams params;
  double chi2 = 0.0;
  std::size_t n_points = 0;
  std::vector<Residual> residuals;
  int iterations = 0;
  bool pol_flagged = false;  // |P| > kPolFlag
  std::vector<std::string> warnings;
};

inline constexpr double kPolFlag = 50.0;

// Sum of squared eps' and eps'' deviations over the window, no weights.
double chi2(const spectra::SpectralTable& table, const FitConfig& cfg, const drude::DrudeParams& p);

// Levenberg-Marquardt over (omega_p, omega_tau, P). Errors come from param_errors
// and are left unset (with a warning) when an error interval is unbounded.
FitReport fit_drude(const spectra::SpectralTable& table, const FitConfig& cfg = {});

struct ParamErrors {
  double err_p = 0.0;
  double err_tau = 0.0;
  double err_pol = 0.0;
};

// One-at-a-time Delta chi^2 intervals. The data carry no stated errors, so chi^2
// is measured in units of the residual variance s^2 = chi2_min / (2n - 3): the
// interval edge is where chi2 - chi2_min = s^2.
ParamErrors param_errors(const spectra::SpectralTable& table, const FitConfig& cfg,
                         const drude::DrudeParams& best);

// Half-width of {theta : f(theta) - f_min <= delta} around theta0, bisecting each
// side. Throws ConvergenceError if f does not rise by delta within 10 * scale.
double delta_chi2_halfwidth(const std::function<double(double)>& f, double theta0, double f_min,
                            double delta, double scale);

// ---------------------------------------------------------------------------

using MirrorFactory = std::function<casimir::MirrorSpec(const drude::DrudeParams&)>;

struct SensitivityRow {
  std::string label;
  drude::DrudeParams params;
  std::vector<casimir::EtaResult> results;
};

// Rows: base, omega_p (1 +/- delta_p), omega_tau (1 +/- delta_tau).
struct SensitivityTable {
  std::vector<double> distances;  // m
  std::vector<SensitivityRow> rows;

  // |eta(+) - eta(-)| at distances[i].
  double spread_p(std::size_t i) const;
  double spread_tau(std::size_t i) const;
};

// Pure Drude mirrors unless `factory` is given.
SensitivityTable sensitivity_table(const drude::DrudeParams& base, double delta_p, double delta_tau,
                                   std::span<const double> distances,
                                   const casimir::ForceOptions& opt = {}, const MirrorFactory& factory = {});

}  // namespace lifshitz::fitting
