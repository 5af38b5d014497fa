#include "isrsgn/units.hpp"

namespace isrsgn {

double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double watt_to_dbm(double watt) { return 10.0 * std::log10(watt / 1e-3); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double ratio) { return 10.0 * std::log10(ratio); }

double alpha_db_to_np(double alpha_db_per_km) { return alpha_db_per_km / kDbPerNeper; }

double wavelength_nm_to_thz(double wavelength_nm) {
  // c [km/s] / lambda [nm] = 1e12 * c / lambda[m] / 1e12 -> THz
  return kSpeedOfLightKmPerS * 1e3 / (wavelength_nm * 1e-9) * 1e-12;
}

}  // namespace isrsgn
