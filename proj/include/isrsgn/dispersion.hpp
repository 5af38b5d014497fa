#pragma once

#include "isrsgn/scenario.hpp"

namespace isrsgn {

struct DispersionCoeffs {
  double beta2_ps2_per_km = 0.0;
  double beta3_ps3_per_km = 0.0;
};

/// beta2 = -D lambda^2 / (2 pi c),  beta3 = (lambda^2 / (2 pi c))^2 (S + 2 D / lambda),
/// both at the fibre reference wavelength.
DispersionCoeffs dispersion_coeffs(const FiberSpec& fiber);

/// Rate of the four-wave-mixing phase mismatch along z (rad/km):
/// -4 pi^2 (f1 - f)(f2 - f) [beta2 + pi beta3 (f1 + f2)], frequencies relative
/// to the reference frequency.
double phase_rate(double f1_thz, double f2_thz, double f_thz, const DispersionCoeffs& disp);

/// Phase mismatch of the triple (f1, f2, f1 + f2 - f) onto f after z km.
double phase_mismatch(double f1_thz, double f2_thz, double f_thz, double z_km, const DispersionCoeffs& disp);

}  // namespace isrsgn
