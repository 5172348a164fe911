#pragma once

// Unit conventions used across the library:
//   - energies held as E/h in GHz
//   - angular frequencies in rad/ns (omega = 2*pi * f[GHz])
//   - times in ns
//   - resonator geometry in SI (meters, H/m, F/m, farads, henries, rad/s)
// Conversion: E/hbar [rad/ns] = 2*pi * E/h [GHz].

namespace uscqec::constants {

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

// exact SI values
inline constexpr double planck_h = 6.62607015e-34;     // J s
inline constexpr double boltzmann_kB = 1.380649e-23;   // J / K

// hbar*omega / (kB*T) for omega in rad/ns and T in K
inline double thermal_ratio(double omega_rad_ns, double temp_K) {
    const double hbar = planck_h / two_pi;
    return hbar * (omega_rad_ns * 1e9) / (boltzmann_kB * temp_K);
}

inline double ghz_to_angular(double f_ghz) { return two_pi * f_ghz; }
inline double angular_to_ghz(double omega_rad_ns) { return omega_rad_ns / two_pi; }

} // namespace uscqec::constants
