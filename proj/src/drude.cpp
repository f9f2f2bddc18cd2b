#include "lifshitz/drude.hpp"

#include <cmath>
#include <limits>

#include "lifshitz/constants.hpp"
#include "lifshitz/errors.hpp"

namespace lifshitz::drude {

namespace {

using constants::kPi;

// Antiderivative of wp^2 wt / ((x^2 + wt^2)(x^2 + zeta^2)), i.e.
// wp^2/(zeta^2 - wt^2) [atan(x/wt) - (wt/zeta) atan(x/zeta)].
// The pole at zeta = wt is removable; inside a 1e-6 relative band a first-order
// expansion in zeta - wt is used.
double band_antiderivative(const DrudeParams& p, double x, double zeta) {
  if (x == 0.0) return 0.0;
  const double wt = p.omega_tau;
  const double wp2 = p.omega_p * p.omega_p;
  if (std::isinf(x)) {
    return wp2 / (zeta * (zeta + wt)) * (kPi / 2.0);
  }
  const double delta = zeta - wt;
  if (std::abs(delta) < 1e-6 * wt) {
    // Value is -wp^2 wt (h(zeta) - h(wt)) / ((zeta - wt)(zeta + wt)) with h(b) = atan(x/b)/b.
    const double b2x2 = wt * wt + x * x;
    const double at = std::atan(x / wt);
    const double h1 = -at / (wt * wt) - x / (wt * b2x2);
    const double h2 = 2.0 * at / (wt * wt * wt) + x / (wt * wt * b2x2) +
                      x * (3.0 * wt * wt + x * x) / (wt * wt * b2x2 * b2x2);
    return -wp2 * wt * (h1 + 0.5 * h2 * delta) / (2.0 * wt + delta);
  }
  return wp2 / (zeta * zeta - wt * wt) * (std::atan(x / wt) - (wt / zeta) * std::atan(x / zeta));
}

}  // namespace

void DrudeParams::validate() const {
  if (!(omega_p > 0.0) || !std::isfinite(omega_p)) throw DomainError("Drude: omega_p must be positive");
  if (!(omega_tau > 0.0) || !std::isfinite(omega_tau)) {
    throw DomainError("Drude: omega_tau must be positive");
  }
  if (!(omega_tau < omega_p)) throw DomainError("Drude: omega_tau must be below omega_p");
  if (!std::isfinite(pol)) throw DomainError("Drude: polarization constant must be finite");
}

DrudeParams make_params(double omega_p, double omega_tau, double pol) {
  DrudeParams p{omega_p, omega_tau, pol, {}, {}, {}};
  p.validate();
  return p;
}

ElectronGas electron_gas_from_bulk(double density_g_cm3, double molar_mass_g_mol,
                                   double electrons_per_atom, double m_eff_ratio) {
  if (!(density_g_cm3 > 0.0) || !(molar_mass_g_mol > 0.0) || !(electrons_per_atom > 0.0)) {
    throw DomainError("electron_gas_from_bulk: inputs must be positive");
  }
  // g/cm^3 -> kg/m^3 is x1000; g/mol -> kg/mol is x1e-3.
  const double atoms_per_m3 = (density_g_cm3 * 1e3) / (molar_mass_g_mol * 1e-3) * constants::kAvogadro;
  return {atoms_per_m3 * electrons_per_atom, m_eff_ratio};
}

spectra::Permittivity eps_real_axis(const DrudeParams& p, double omega) {
  if (!(omega > 0.0)) throw DomainError("eps_real_axis: omega must be positive");
  const double wp2 = p.omega_p * p.omega_p;
  const double d = omega * omega + p.omega_tau * p.omega_tau;
  return {p.pol - wp2 / d, wp2 * p.omega_tau / (omega * d)};
}

double eps_imag_axis_closed(const DrudeParams& p, double zeta) {
  if (!(zeta > 0.0)) throw DomainError("eps_imag_axis_closed: zeta must be positive");
  return 1.0 + p.omega_p * p.omega_p / (zeta * (zeta + p.omega_tau));
}

double eps_imag_axis_band(const DrudeParams& p, double lo, double hi, double zeta) {
  if (!(zeta > 0.0)) throw DomainError("eps_imag_axis_band: zeta must be positive");
  if (!(lo >= 0.0) || !(hi >= lo)) throw DomainError("eps_imag_axis_band: need 0 <= lo <= hi");
  if (lo == hi) return 0.0;
  return (2.0 / kPi) * (band_antiderivative(p, hi, zeta) - band_antiderivative(p, lo, zeta));
}

double eps1_low_contribution(const DrudeParams& p, double omega_c, double zeta) {
  if (!(omega_c > 0.0)) throw DomainError("eps1_low_contribution: omega_c must be positive");
  return eps_imag_axis_band(p, 0.0, omega_c, zeta);
}

double plasma_from_density(const ElectronGas& gas) {
  if (!(gas.n_density >= 0.0) || !(gas.m_eff_ratio > 0.0)) {
    throw DomainError("plasma_from_density: density must be >= 0 and effective mass > 0");
  }
  const double e = constants::kElementaryCharge;
  const double w2 = gas.n_density * e * e /
                    (constants::kVacuumPermittivity * constants::kElectronMass * gas.m_eff_ratio);
  return constants::rad_per_s_to_ev(std::sqrt(w2));
}

}  // namespace lifshitz::drude
