#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "isrsgn/dispersion.hpp"
#include "isrsgn/scenario.hpp"
#include "isrsgn/span_kernel.hpp"

namespace isrsgn {

enum class QuadratureScheme { hyperbolic, cartesian_oracle };

/// Numerical settings of the NLI PSD integration.
///
/// Hyperbolic scheme: the (f1, f2) plane is covered by rays
/// (f1 - f, f2 - f) = t (+-e^theta, +-e^-theta). Along a ray (f1 - f)(f2 - f) = +-t^2,
/// so the dispersive phase depends on t only, and dnu1 dnu2 = 2t dt dtheta. The
/// t-integral is split at every PSD discontinuity and into panels of bounded
/// phase increment; the theta-integral is adaptive Gauss-Kronrod.
/// Beyond `coherent_periods` oscillation periods of the shortest span, inter-span
/// cross terms average out and the integrand is replaced by its incoherent,
/// oscillation-averaged form.
struct QuadratureSpec {
  QuadratureScheme scheme = QuadratureScheme::hyperbolic;
  int nodes_per_panel = 8;          // Gauss-Legendre nodes per inner panel
  double max_panel_phase = 6.283185307179586;  // rad of the fastest phase term per panel
  double max_panel_frequency_thz = 0.25;  // max excursion of f1, f2, f3 per panel
  double theta_panel_width = 1.0;   // initial width of the adaptive theta panels
  double rel_tolerance = 1e-3;      // target relative error of G(f)
  std::size_t max_theta_panels = 4000;
  double coherent_periods = 16.0;
  double span_kernel_tolerance = 1e-6;
  int channel_points = 3;           // Gauss-Legendre points across a channel band
  int cartesian_panels_per_channel = 0;  // 0: derived from the phase resolution
  std::optional<double> band_lo_thz;     // integration limits; default: occupied band
  std::optional<double> band_hi_thz;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// Per-channel result row.
struct NliEntry {
  std::size_t channel_index;
  double f_thz;
  double power_w;
  double sigma2_nli_w;
  double snr_nli_db;
};

struct NliReport {
  std::vector<NliEntry> entries;
};

/// S_k(f1, f2, f) = sqrt(G(f1) G(f2) G(f1 + f2 - f) / G(f)) for one span load.
/// Zero when any of the three mixing frequencies is unoccupied or when G(f) == 0.
double coupling_factor(const ChannelGrid& grid, const SpectralLoad& load, double f1, double f2, double f);

/// S_k times the distance integral of span k including the phase accumulated
/// over the preceding spans:
///   S_k integral_0^{L_k} rho_k(z, f1 + f2 - f) exp(j phi(f1, f2, f, Lcum_k + z)) dz.
std::complex<double> span_kernel(const Link& link, std::size_t k, double f1, double f2, double f,
                                 double rel_tolerance = 1e-6);

/// Result of one PSD evaluation.
struct PsdEvaluation {
  /// G(f) after the first n+1 spans, n = 0 .. span_count-1. back() is the full link.
  std::vector<double> by_span_count;
  double estimated_rel_error = 0.0;
  std::size_t integrand_evaluations = 0;

  double psd() const { return by_span_count.back(); }
};

/// Prepared NLI model of one link. Construction precomputes span kernels and
/// discontinuity tables; evaluation is const and may be shared across threads.
class NliEngine {
 public:
  NliEngine(const Link& link, QuadratureSpec quad);
  ~NliEngine();
  NliEngine(NliEngine&&) noexcept;
  NliEngine& operator=(NliEngine&&) noexcept;

  const Link& link() const;
  const QuadratureSpec& quadrature() const;

  /// G(f) in W/THz. f must lie inside a channel that is occupied in span 1.
  /// Throws QuadratureError when the adaptive rule misses its tolerance.
  PsdEvaluation evaluate(double f_thz) const;
  double psd(double f_thz) const { return evaluate(f_thz).psd(); }

  /// Integrand |sum_k gamma_k S_k K_k|^2 at (f1, f2) for the full link.
  double integrand(double f1, double f2, double f) const;

  /// sigma^2 of channel i for every span-count prefix (index n -> n+1 spans).
  std::vector<double> channel_sigma2_by_span_count(std::size_t channel) const;
  double channel_sigma2(std::size_t channel) const { return channel_sigma2_by_span_count(channel).back(); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// NLI PSD G(f) of the link (W/THz).
double nli_psd(const Link& link, double f_thz, const QuadratureSpec& quad);

/// sigma^2_NLI of channel i (W): the PSD integrated over the channel band with
/// quad.channel_points Gauss-Legendre points.
double integrate_channel(const Link& link, std::size_t channel, const QuadratureSpec& quad);

/// Channels occupied in every span, the default set of signal channels.
std::vector<std::size_t> end_to_end_channels(const Link& link);

/// One entry per channel in `channels` (default: end_to_end_channels), ordered
/// by channel index. Channels are evaluated in parallel on `threads` workers
/// (0: ISRSGN_THREADS or hardware concurrency); results do not depend on it.
NliReport snr_report(const Link& link, const QuadratureSpec& quad,
                     std::optional<std::vector<std::size_t>> channels = std::nullopt, unsigned threads = 0);

/// Reports after every span-count prefix (element n: first n+1 spans), from a
/// single pass over the integrand.
std::vector<NliReport> snr_report_by_span_count(const Link& link, const QuadratureSpec& quad,
                                                std::optional<std::vector<std::size_t>> channels = std::nullopt,
                                                unsigned threads = 0);

}  // namespace isrsgn
