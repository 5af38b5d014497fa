#pragma once

#include <vector>

#include "isrsgn/scenario.hpp"

namespace isrsgn {

/// (1 - exp(-alpha z)) / alpha. Throws on negative z or non-positive alpha.
double effective_length(double z_km, double alpha_np_per_km);

/// Signal power evolution along one span under inter-channel stimulated Raman
/// scattering, using the triangular (linear in frequency) Raman gain model.
///
/// With T(z) = P Cr L_eff(z) the normalized power ratio of frequency f is
///
///   rho(z, f) = P exp(-alpha z) exp(-T(z) f) / integral G(v) exp(-T(z) v) dv
///
/// so that the PSD at distance z is G(f) rho(z, f). The denominator is evaluated
/// in closed form per occupied rectangular channel. rho(0, f) == 1 and the total
/// power always decays as exp(-alpha z).
class RamanProfile {
 public:
  RamanProfile(std::vector<ChannelBand> bands, double alpha_np_per_km, double raman_slope);
  RamanProfile(const ChannelGrid& grid, const SpectralLoad& load, const FiberSpec& fiber);

  double total_power_w() const { return total_power_w_; }
  double alpha_np_per_km() const { return alpha_; }
  double raman_slope() const { return cr_; }
  const std::vector<ChannelBand>& bands() const { return bands_; }

  /// T(z) = P Cr L_eff(z), in 1/THz.
  double raman_exponent(double z_km) const;
  /// integral G(v) exp(-T v) dv over the occupied bands (W).
  double normalization(double raman_exponent) const;
  /// Power-weighted mean frequency of the load reshaped by exp(-T v).
  double mean_frequency(double raman_exponent) const;

  /// rho(z, f). For an empty load this degenerates to exp(-alpha z).
  double gain(double f_thz, double z_km) const;
  double log_gain(double f_thz, double z_km) const;
  /// -d ln rho / dz, the local power decay rate of frequency f.
  double decay_rate(double f_thz, double z_km) const;

  double lowest_center_thz() const;
  double highest_center_thz() const;

 private:
  std::vector<ChannelBand> bands_;
  double alpha_;
  double cr_;
  double total_power_w_ = 0.0;
};

/// rho(z, f) of the profile; see RamanProfile.
double isrs_gain(const RamanProfile& profile, double f_thz, double z_km);

/// 10 log10(rho(z, f_min) / rho(z, f_max)) between the outermost occupied channel
/// centers. Positive when power flows toward lower frequencies. Needs at least
/// two occupied channels.
double tilt_db(const RamanProfile& profile, double z_km);

}  // namespace isrsgn
