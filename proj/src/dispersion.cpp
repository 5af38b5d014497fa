#include "isrsgn/dispersion.hpp"

#include "isrsgn/units.hpp"

namespace isrsgn {

DispersionCoeffs dispersion_coeffs(const FiberSpec& fiber) {
  fiber.validate();
  // 1 km/s == 1e12 nm / 1e12 ps, so c keeps its numeric value in nm/ps.
  const double c_nm_per_ps = kSpeedOfLightKmPerS;
  const double lambda = fiber.ref_wavelength_nm;
  const double k = lambda * lambda / (2.0 * kPi * c_nm_per_ps);  // nm ps
  DispersionCoeffs d;
  d.beta2_ps2_per_km = -fiber.dispersion_ps_nm_km * k;
  d.beta3_ps3_per_km = k * k * (fiber.slope_ps_nm2_km + 2.0 * fiber.dispersion_ps_nm_km / lambda);
  return d;
}

double phase_rate(double f1_thz, double f2_thz, double f_thz, const DispersionCoeffs& disp) {
  return -4.0 * kPi * kPi * (f1_thz - f_thz) * (f2_thz - f_thz) *
         (disp.beta2_ps2_per_km + kPi * disp.beta3_ps3_per_km * (f1_thz + f2_thz));
}

double phase_mismatch(double f1_thz, double f2_thz, double f_thz, double z_km, const DispersionCoeffs& disp) {
  return phase_rate(f1_thz, f2_thz, f_thz, disp) * z_km;
}

}  // namespace isrsgn
