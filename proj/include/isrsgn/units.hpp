#pragma once

#include <cmath>
#include <numbers>

// Unit system used throughout the library:
//   frequency  THz (relative to the grid center unless stated otherwise)
//   power      W,  PSD W/THz
//   length     km, time ps
//   beta2      ps^2/km, beta3 ps^3/km, gamma 1/(W km), Cr 1/(W THz km)
// With these units THz^2 * ps^2/km * km is dimensionless, so phase terms need no
// scale factor.

namespace isrsgn {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLightKmPerS = 299792.458;
inline constexpr double kPlanck = 6.62607015e-34;  // J s
inline constexpr double kDbPerNeper = 4.342944819032518;  // 10 log10(e)

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);
double db_to_linear(double db);
double linear_to_db(double ratio);

/// Power attenuation in 1/km from a dB/km figure.
double alpha_db_to_np(double alpha_db_per_km);

/// Absolute optical frequency (THz) of a vacuum wavelength in nm.
double wavelength_nm_to_thz(double wavelength_nm);

}  // namespace isrsgn
