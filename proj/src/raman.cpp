#include "isrsgn/raman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isrsgn/units.hpp"

namespace isrsgn {

namespace {

// sinh(x)/x and its derivative, with series near 0.
double sinhc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 + x * x / 6.0;
  return std::sinh(x) / x;
}

double sinhc_derivative(double x) {
  if (std::abs(x) < 1e-3) return x / 3.0 + x * x * x / 30.0;
  return (x * std::cosh(x) - std::sinh(x)) / (x * x);
}

}  // namespace

double effective_length(double z_km, double alpha_np_per_km) {
  if (z_km < 0.0) throw std::invalid_argument("effective_length: negative distance");
  if (!(alpha_np_per_km > 0.0)) throw std::invalid_argument("effective_length: alpha must be > 0");
  return -std::expm1(-alpha_np_per_km * z_km) / alpha_np_per_km;
}

RamanProfile::RamanProfile(std::vector<ChannelBand> bands, double alpha_np_per_km, double raman_slope)
    : bands_(std::move(bands)), alpha_(alpha_np_per_km), cr_(raman_slope) {
  if (!(alpha_ > 0.0)) throw std::invalid_argument("raman profile: alpha must be > 0");
  if (!(cr_ >= 0.0)) throw std::invalid_argument("raman profile: Cr must be >= 0");
  for (const ChannelBand& b : bands_) {
    if (!(b.bandwidth_thz > 0.0) || !(b.power_w >= 0.0))
      throw std::invalid_argument("raman profile: invalid channel band");
    total_power_w_ += b.power_w;
  }
}

RamanProfile::RamanProfile(const ChannelGrid& grid, const SpectralLoad& load, const FiberSpec& fiber)
    : RamanProfile(occupied_bands(grid, load), fiber.alpha_np_per_km(), fiber.raman_slope_per_w_thz_km) {}

double RamanProfile::raman_exponent(double z_km) const {
  return total_power_w_ * cr_ * effective_length(z_km, alpha_);
}

double RamanProfile::normalization(double t) const {
  double acc = 0.0;
  for (const ChannelBand& b : bands_) {
    const double h = 0.5 * b.bandwidth_thz;
    acc += b.power_w * std::exp(-t * b.center_thz) * sinhc(t * h);
  }
  return acc;
}

double RamanProfile::mean_frequency(double t) const {
  // integral over [c-h, c+h] of v exp(-t v) = exp(-t c) 2h (c sinhc(t h) - h sinhc'(t h))
  double num = 0.0;
  double den = 0.0;
  for (const ChannelBand& b : bands_) {
    const double h = 0.5 * b.bandwidth_thz;
    const double e = b.power_w * std::exp(-t * b.center_thz);
    num += e * (b.center_thz * sinhc(t * h) - h * sinhc_derivative(t * h));
    den += e * sinhc(t * h);
  }
  return den > 0.0 ? num / den : 0.0;
}

double RamanProfile::log_gain(double f_thz, double z_km) const {
  if (z_km < 0.0) throw std::invalid_argument("isrs_gain: negative distance");
  const double attenuation = -alpha_ * z_km;
  if (total_power_w_ <= 0.0 || cr_ == 0.0 || z_km == 0.0) return attenuation;
  const double t = raman_exponent(z_km);
  return attenuation - t * f_thz + std::log(total_power_w_ / normalization(t));
}

double RamanProfile::gain(double f_thz, double z_km) const { return std::exp(log_gain(f_thz, z_km)); }

double RamanProfile::decay_rate(double f_thz, double z_km) const {
  if (total_power_w_ <= 0.0 || cr_ == 0.0) return alpha_;
  const double t = raman_exponent(z_km);
  const double dt_dz = total_power_w_ * cr_ * std::exp(-alpha_ * z_km);
  return alpha_ + dt_dz * (f_thz - mean_frequency(t));
}

double RamanProfile::lowest_center_thz() const {
  if (bands_.empty()) throw std::logic_error("raman profile: empty load");
  return std::min_element(bands_.begin(), bands_.end(),
                          [](const auto& a, const auto& b) { return a.center_thz < b.center_thz; })
      ->center_thz;
}

double RamanProfile::highest_center_thz() const {
  if (bands_.empty()) throw std::logic_error("raman profile: empty load");
  return std::max_element(bands_.begin(), bands_.end(),
                          [](const auto& a, const auto& b) { return a.center_thz < b.center_thz; })
      ->center_thz;
}

double isrs_gain(const RamanProfile& profile, double f_thz, double z_km) { return profile.gain(f_thz, z_km); }

double tilt_db(const RamanProfile& profile, double z_km) {
  if (profile.bands().size() < 2) throw std::invalid_argument("tilt_db: needs at least two occupied channels");
  const double lo = profile.log_gain(profile.lowest_center_thz(), z_km);
  const double hi = profile.log_gain(profile.highest_center_thz(), z_km);
  return kDbPerNeper * (lo - hi);
}

}  // namespace isrsgn
