#pragma once

// Physical constants (CODATA 2018) and unit conversions shared by every module.
// Frequencies are carried in eV throughout the library.

namespace lifshitz::constants {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kSpeedOfLight = 299792458.0;             // m/s
inline constexpr double kHbar = 1.054571817e-34;                 // J s
inline constexpr double kElementaryCharge = 1.602176634e-19;     // C
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kElectronMass = 9.1093837015e-31;        // kg
inline constexpr double kAvogadro = 6.02214076e23;               // 1/mol

// Angular frequency of one eV photon as used by the optical-constant
// handbooks: 1 eV = 1.519e15 rad/s.
inline constexpr double kRadPerSecondPerEv = 1.519e15;

inline constexpr double kMetersPerMicron = 1.0e-6;

constexpr double ev_to_rad_per_s(double ev) { return ev * kRadPerSecondPerEv; }
constexpr double rad_per_s_to_ev(double w) { return w / kRadPerSecondPerEv; }

}  // namespace lifshitz::constants
