#pragma once

#include <complex>
#include <vector>

#include "isrsgn/raman.hpp"

namespace isrsgn {

/// Closed-form integral over one span of exp(-alpha z) exp(j omega z), the
/// Raman-free link function. Used as the correctness oracle for SpanKernel.
std::complex<double> span_integral_closed_form(double alpha_np_per_km, double length_km, double omega);

/// Evaluates the inner distance integral of one span,
///
///   K(omega, f3) = integral_0^L rho(z, f3) exp(j omega z) dz,
///
/// where rho is the ISRS power profile of the span input load.
///
/// rho(z, f3) = exp(-alpha z) q(z, f3) with q smooth and slowly varying. The span
/// is split into panels of equal effective-length increment; on each panel q is
/// replaced by its degree-7 interpolant and the product with exp((-alpha + j omega) z)
/// is integrated exactly (Filon-type rule). The error therefore does not grow
/// with omega. The panel count is the smallest power of two whose kernel at the
/// band edges differs from the doubled rule by less than the tolerance, probed at
/// omega = 0, alpha, 4 alpha and 16 alpha. A
/// Raman-free profile needs a single panel and reproduces the closed form.
class SpanKernel {
 public:
  /// f_lo/f_hi bound the frequencies at which the kernel will be evaluated.
  SpanKernel(RamanProfile profile, double length_km, double f_lo_thz, double f_hi_thz,
             double rel_tolerance = 1e-6);

  std::complex<double> integrate(double omega, double f3_thz) const;

  /// integrate(omega, f3) == sum_n w_n q_n(f3) with w = filon_weights(omega) and
  /// q_n the smooth profile factor at the interpolation nodes. Kernels of equal
  /// length, attenuation and panel count share the weights.
  void filon_weights(double omega, std::vector<std::complex<double>>& w) const;
  std::complex<double> apply_weights(const std::vector<std::complex<double>>& w, double f3_thz) const;

  /// Rebuilds the kernel with more panels (a no-op when count is not larger).
  void refine_to(std::size_t count);

  /// Oscillation-averaged |K|^2 for |omega| >> alpha: the two endpoint
  /// contributions rho(0)^2/(a0^2+omega^2) + rho(L)^2/(aL^2+omega^2) with a the
  /// local decay rate of rho. Exact average for a Raman-free span.
  double averaged_power(double omega, double f3_thz) const;

  double length_km() const { return length_; }
  double alpha_np_per_km() const { return alpha_; }
  std::size_t panel_count() const { return panel_mid_.size(); }
  const RamanProfile& profile() const { return profile_; }
  bool raman_free() const { return raman_free_; }

 private:
  void build_panels(std::size_t count);

  RamanProfile profile_;
  double length_;
  double alpha_;
  bool raman_free_;
  std::vector<double> panel_mid_;
  std::vector<double> panel_half_;
  std::vector<double> node_exponent_;  // T(z_n)
  std::vector<double> node_log_weight_;  // ln(P / normalization(T(z_n)))
  // far-field endpoint data
  double end_exponent_ = 0.0;
  double end_log_weight_ = 0.0;
  double start_slope_ = 0.0;  // dT/dz at 0
  double end_slope_ = 0.0;    // dT/dz at L
  double start_mean_ = 0.0;
  double end_mean_ = 0.0;
};

}  // namespace isrsgn
