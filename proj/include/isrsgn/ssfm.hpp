#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "isrsgn/dispersion.hpp"
#include "isrsgn/fft.hpp"
#include "isrsgn/modulation.hpp"
#include "isrsgn/scenario.hpp"
#include "isrsgn/scenario_io.hpp"

namespace isrsgn {

enum class GainMode { flat, isrs_compensating };

struct SimulationSpec {
  std::size_t symbols = std::size_t{1} << 14;  // per channel and polarization, power of two
  int realizations = 4;
  int samples_per_symbol = 16;  // sample rate = samples_per_symbol * symbol rate, power of two
  int steps_per_span = 200;
  std::uint64_t seed = 1;
  GainMode gain = GainMode::isrs_compensating;
  unsigned threads = 0;  // realizations run in parallel

  void validate() const;
};

/// Step boundaries z_0 = 0 < ... < z_M = L with equal loss-weighted length
/// between them: z_m = -ln(1 - (m/M)(1 - exp(-alpha L))) / alpha.
std::vector<double> log_step_boundaries(double alpha_np_per_km, double length_km, int steps);

/// Sampled dual-polarization field stored as two spectra (FFT bin order).
/// Power of one bin is |X_k|^2 / N^2 (W); the grid center sits at bin 0.
struct OpticalField {
  double sample_rate_thz = 0.0;
  std::vector<std::complex<double>> x;
  std::vector<std::complex<double>> y;

  std::size_t size() const { return x.size(); }
  double bin_spacing_thz() const { return sample_rate_thz / static_cast<double>(x.size()); }
  /// Frequency of bin k relative to the grid center (THz).
  double bin_frequency(std::size_t k) const;
  double total_power_w() const;
};

/// Bin layout of a channel grid inside a sampled field.
class FieldLayout {
 public:
  /// Throws AliasingError when the occupied grid band does not fit in the
  /// sampled bandwidth, or when the channel centers are not on the bin grid.
  FieldLayout(const ChannelGrid& grid, std::size_t symbols, int samples_per_symbol);

  std::size_t size() const { return size_; }
  std::size_t symbols() const { return symbols_; }
  double sample_rate_thz() const { return sample_rate_thz_; }
  /// FFT bins of channel i, in increasing frequency order.
  std::vector<std::size_t> channel_bins(std::size_t i) const;

 private:
  std::size_t size_;
  std::size_t symbols_;
  double sample_rate_thz_;
  std::vector<long> center_bin_;
};

/// Transmitted symbols of one channel (unit average energy per polarization).
struct ChannelSymbols {
  std::vector<std::complex<double>> x;
  std::vector<std::complex<double>> y;
};

/// Adds channel i with the given symbols to the field: ideal Nyquist (rectangular
/// spectrum) pulses, scaled so the channel carries exactly power_w, then
/// dispersed by predispersion_km of `fiber`.
void add_channel(OpticalField& field, const FieldLayout& layout, const ChannelGrid& grid, std::size_t i,
                 const ChannelSymbols& symbols, double power_w, double predispersion_km, const FiberSpec& fiber);

/// Removes channel i from the field.
void clear_channel(OpticalField& field, const FieldLayout& layout, std::size_t i);

/// Power of every slot of the grid (W).
std::vector<double> channel_powers(const OpticalField& field, const FieldLayout& layout, std::size_t channels);

/// Field with every occupied slot of `load` carrying fresh symbols. The drawn
/// symbols are returned in `symbols` (indexed by slot; empty for empty slots).
OpticalField transmit(const ChannelGrid& grid, const SpectralLoad& load, const ModulationSpec& modulation,
                      const SimulationSpec& sim, RandomSource& rng, std::vector<ChannelSymbols>& symbols,
                      const FiberSpec& fiber, const std::vector<double>& predispersion_km = {});

/// Split-step propagation over one span: symmetric linear/nonlinear splitting
/// on a logarithmic step plan. The linear operator applies dispersion,
/// attenuation and ISRS as a frequency-dependent loss computed from the bin
/// powers at the start of each linear half-step. The nonlinear operator is the
/// Manakov Kerr rotation with factor 8/9.
void propagate_span(OpticalField& field, double length_km, const FiberSpec& fiber, int steps, const Fft* fft);

/// Amplifier after a span. flat: restores `target_total_w`; isrs_compensating:
/// rescales each occupied slot to its entry of `target_powers_w`.
void gain_stage(OpticalField& field, const FieldLayout& layout, GainMode mode,
                const std::vector<double>& target_powers_w);

/// Ideal dispersion compensation over `length_km` of `fiber`.
void compensate_dispersion(OpticalField& field, double length_km, const FiberSpec& fiber);

/// Noise statistics of one received channel after dispersion compensation,
/// brick-wall matched filtering, symbol-rate sampling and a least-squares
/// complex scalar per polarization.
struct ReceivedChannel {
  double signal_energy = 0.0;  // sum |x|^2
  double error_energy = 0.0;   // sum |y / h - x|^2
  double snr_db() const;
};

ReceivedChannel receive_channel(const OpticalField& field, const FieldLayout& layout, std::size_t i,
                                const ChannelSymbols& sent);

struct SsfmEntry {
  std::size_t channel_index;
  double f_thz;
  double power_w;
  double snr_db;  // error energies pooled over realizations
};

struct SsfmReport {
  std::vector<SsfmEntry> entries;
};

/// Full simulation of a scenario: every span followed by a gain stage; in
/// network mode, slots whose lightpath changes at a span boundary are dropped
/// and refilled with fresh (pre-dispersed) symbols. Reports the signal channels
/// (end-to-end occupied) after `span_count` spans (default: all).
SsfmReport run_ssfm(const Scenario& scenario, const ModulationSpec& modulation, const SimulationSpec& sim,
                    std::optional<std::size_t> span_count = std::nullopt);

/// Channel powers after one span with gamma = 0 (no nonlinearity): the ISRS
/// loss profile of the split-step propagator alone.
std::vector<double> linear_span_output_powers(const ChannelGrid& grid, const SpectralLoad& load, double length_km,
                                              const FiberSpec& fiber, const SimulationSpec& sim);

}  // namespace isrsgn
