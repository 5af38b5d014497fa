#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace isrsgn {

/// Physical constants of one fibre type.
struct FiberSpec {
  double alpha_db_per_km = 0.2;
  double dispersion_ps_nm_km = 17.0;    // D
  double slope_ps_nm2_km = 0.067;       // S
  double gamma_per_w_km = 1.2;
  double raman_slope_per_w_thz_km = 0.028;  // Cr
  double ref_wavelength_nm = 1550.0;

  /// Power attenuation coefficient in 1/km.
  double alpha_np_per_km() const;
  /// Throws std::invalid_argument when a physical constraint is violated.
  void validate() const;
};

/// WDM slot layout, symmetric about 0 THz.
class ChannelGrid {
 public:
  ChannelGrid() = default;
  ChannelGrid(std::size_t channel_count, double spacing_thz, double symbol_rate_gbd);

  std::size_t channel_count() const { return centers_.size(); }
  double spacing_thz() const { return spacing_thz_; }
  double symbol_rate_gbd() const { return symbol_rate_gbd_; }
  /// Occupied bandwidth of one channel in THz.
  double channel_bandwidth_thz() const { return symbol_rate_gbd_ * 1e-3; }
  const std::vector<double>& center_frequencies() const { return centers_; }
  double center(std::size_t i) const { return centers_.at(i); }

  /// Slot whose signal band [f_i - B/2, f_i + B/2) contains f, if any.
  std::optional<std::size_t> slot_containing(double f_thz) const;

 private:
  double spacing_thz_ = 0.0;
  double symbol_rate_gbd_ = 0.0;
  std::vector<double> centers_;
};

/// Per-slot launch powers at a span input. A slot is occupied iff its power is > 0.
class SpectralLoad {
 public:
  SpectralLoad() = default;
  explicit SpectralLoad(std::vector<double> power_w);

  static SpectralLoad uniform(std::size_t channel_count, double power_w);

  std::size_t slot_count() const { return power_w_.size(); }
  bool occupied(std::size_t i) const { return power_w_.at(i) > 0.0; }
  double power_w(std::size_t i) const { return power_w_.at(i); }
  const std::vector<double>& powers_w() const { return power_w_; }
  std::size_t occupied_count() const;
  double total_power_w() const { return total_power_w_; }

  /// PSD in W/THz at frequency f for the given grid (piecewise constant).
  double psd_at(const ChannelGrid& grid, double f_thz) const;

  bool operator==(const SpectralLoad& other) const { return power_w_ == other.power_w_; }

 private:
  std::vector<double> power_w_;
  double total_power_w_ = 0.0;
};

/// One occupied rectangular channel band.
struct ChannelBand {
  double center_thz;
  double bandwidth_thz;
  double power_w;
  double psd() const { return power_w / bandwidth_thz; }
};

/// Occupied channel bands of a load, in slot order.
std::vector<ChannelBand> occupied_bands(const ChannelGrid& grid, const SpectralLoad& load);

struct Span {
  double length_km;
  FiberSpec fiber;
  SpectralLoad load;  // PSD at the span input
};

/// Ordered span sequence of one lightpath.
class Link {
 public:
  Link(ChannelGrid grid, std::vector<Span> spans);

  const ChannelGrid& grid() const { return grid_; }
  const std::vector<Span>& spans() const { return spans_; }
  const Span& span(std::size_t k) const { return spans_.at(k); }
  std::size_t span_count() const { return spans_.size(); }
  /// Distance from the link input to the input of span k.
  double cumulative_km(std::size_t k) const { return cumulative_km_.at(k); }
  double total_length_km() const;

  /// Link made of the first `count` spans.
  Link prefix(std::size_t count) const;

 private:
  ChannelGrid grid_;
  std::vector<Span> spans_;
  std::vector<double> cumulative_km_;
};

/// Six spans summing to 742 km, split evenly.
std::vector<double> default_span_lengths_km();

/// Fully loaded point-to-point link: every slot at the same power in every span.
Link build_ptp_scenario(const ChannelGrid& grid, double per_channel_power_dbm,
                        const std::vector<double>& span_lengths_km, const FiberSpec& fiber);

/// Randomized add/drop state of every span of a lightpath.
struct NetworkLoadPlan {
  /// Per-span slot state. lightpath[i] == 0 marks an empty slot; nonzero values
  /// identify a channel for as long as it stays in the link.
  struct SpanState {
    std::vector<std::uint32_t> lightpath;
    std::vector<double> power_offset_db;
    std::vector<double> predispersion_km;

    bool occupied(std::size_t i) const { return lightpath.at(i) != 0; }
    std::size_t occupied_count() const;
    bool operator==(const SpanState&) const = default;
  };

  std::string rng_algorithm;
  std::uint64_t seed = 0;
  std::size_t channel_count = 0;
  std::size_t signal_stride = 1;
  double drop_fraction = 0.0;
  double utilization = 1.0;
  std::size_t target_occupied = 0;
  std::vector<std::size_t> signal_channels;
  std::vector<SpanState> spans;

  std::size_t span_count() const { return spans.size(); }
  bool is_signal(std::size_t slot) const;
  bool operator==(const NetworkLoadPlan&) const = default;
};

/// Generates the add/drop plan. Signal channels sit on every `signal_stride`-th
/// slot and are never dropped. At every span boundary after the first,
/// floor(drop_fraction * interferers) interferers are removed uniformly at random,
/// then empty slots are filled uniformly at random until
/// round(utilization * channel_count) slots are occupied. Each added interferer
/// draws a power offset in [-1, 1] dB and a pre-dispersion in [0, 1000] km.
NetworkLoadPlan build_network_plan(const ChannelGrid& grid, std::size_t signal_stride,
                                   double drop_fraction, double utilization, std::uint64_t seed,
                                   std::size_t span_count);

/// Launch powers at the input of span k: signal channels at the base power,
/// interferers offset by their plan offset, empty slots at zero.
SpectralLoad load_at_span(const NetworkLoadPlan& plan, std::size_t k, double base_power_dbm);

/// Link whose span k carries load_at_span(plan, k, base_power_dbm).
Link build_network_link(const ChannelGrid& grid, const NetworkLoadPlan& plan, double base_power_dbm,
                        const std::vector<double>& span_lengths_km, const FiberSpec& fiber);

}  // namespace isrsgn
