#pragma once

#include <optional>

#include "lifshitz/spectra.hpp"

namespace lifshitz::drude {

// Drude parameters in eV. `pol` is the constant polarization term P added to
// eps' (P = 1 is the plain Drude function). Errors are statistical, optional.
struct DrudeParams {
  double omega_p = 0.0;
  double omega_tau = 0.0;
  double pol = 1.0;
  std::optional<double> err_p;
  std::optional<double> err_tau;
  std::optional<double> err_pol;

  // Throws DomainError unless 0 < omega_tau < omega_p.
  void validate() const;
};

DrudeParams make_params(double omega_p, double omega_tau, double pol = 1.0);

struct ElectronGas {
  double n_density = 0.0;    // conduction electrons per m^3
  double m_eff_ratio = 1.0;  // effective mass in units of the free electron mass
};

// Electron gas of a bulk metal from its mass density (g/cm^3) and molar mass (g/mol).
ElectronGas electron_gas_from_bulk(double density_g_cm3, double molar_mass_g_mol,
                                   double electrons_per_atom = 1.0, double m_eff_ratio = 1.0);

// eps' = P - wp^2/(w^2 + wt^2),  eps'' = wp^2 wt / (w (w^2 + wt^2)).
spectra::Permittivity eps_real_axis(const DrudeParams& p, double omega);

// eps(i zeta) = 1 + wp^2 / (zeta (zeta + wt)).
double eps_imag_axis_closed(const DrudeParams& p, double zeta);

// (2/pi) * integral over [lo, hi] of x eps''(x) / (x^2 + zeta^2) for the Drude eps''.
double eps_imag_axis_band(const DrudeParams& p, double lo, double hi, double zeta);

// Contribution of frequencies below omega_c to eps(i zeta), in closed form.
double eps1_low_contribution(const DrudeParams& p, double omega_c, double zeta);

// Plasma frequency in eV.
double plasma_from_density(const ElectronGas& gas);

}  // namespace lifshitz::drude
