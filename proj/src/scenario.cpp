#include "isrsgn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "isrsgn/rng.hpp"
#include "isrsgn/units.hpp"

namespace isrsgn {

double FiberSpec::alpha_np_per_km() const { return alpha_db_to_np(alpha_db_per_km); }

void FiberSpec::validate() const {
  if (!(alpha_db_per_km > 0.0)) throw std::invalid_argument("fiber: attenuation must be > 0");
  if (!(gamma_per_w_km >= 0.0)) throw std::invalid_argument("fiber: gamma must be >= 0");
  if (!(raman_slope_per_w_thz_km >= 0.0))
    throw std::invalid_argument("fiber: Raman gain slope must be >= 0");
  if (!(ref_wavelength_nm > 0.0))
    throw std::invalid_argument("fiber: reference wavelength must be > 0");
  if (!std::isfinite(dispersion_ps_nm_km) || !std::isfinite(slope_ps_nm2_km))
    throw std::invalid_argument("fiber: dispersion parameters must be finite");
}

ChannelGrid::ChannelGrid(std::size_t channel_count, double spacing_thz, double symbol_rate_gbd)
    : spacing_thz_(spacing_thz), symbol_rate_gbd_(symbol_rate_gbd) {
  if (channel_count == 0) throw std::invalid_argument("grid: channel count must be >= 1");
  if (!(spacing_thz > 0.0)) throw std::invalid_argument("grid: spacing must be > 0");
  if (!(symbol_rate_gbd > 0.0)) throw std::invalid_argument("grid: symbol rate must be > 0");
  // Small slack so that Nyquist-spaced grids (rate == spacing) pass despite rounding.
  if (symbol_rate_gbd * 1e-3 > spacing_thz * (1.0 + 1e-12))
    throw std::invalid_argument("grid: symbol rate exceeds channel spacing");
  centers_.resize(channel_count);
  const double mid = 0.5 * static_cast<double>(channel_count - 1);
  for (std::size_t i = 0; i < channel_count; ++i)
    centers_[i] = (static_cast<double>(i) - mid) * spacing_thz;
}

std::optional<std::size_t> ChannelGrid::slot_containing(double f_thz) const {
  if (centers_.empty()) return std::nullopt;
  const double pos = (f_thz - centers_.front()) / spacing_thz_;
  const double nearest = std::round(pos);
  if (nearest < 0.0 || nearest > static_cast<double>(centers_.size() - 1)) return std::nullopt;
  auto i = static_cast<std::size_t>(nearest);
  const double half = 0.5 * channel_bandwidth_thz();
  const double offset = f_thz - centers_[i];
  if (offset >= -half && offset < half) return i;
  // Contiguous grids: the upper edge of slot i is the lower edge of slot i+1.
  if (offset >= half && i + 1 < centers_.size() && f_thz - centers_[i + 1] >= -half) return i + 1;
  return std::nullopt;
}

SpectralLoad::SpectralLoad(std::vector<double> power_w) : power_w_(std::move(power_w)) {
  for (double p : power_w_) {
    if (!std::isfinite(p) || p < 0.0)
      throw std::invalid_argument("load: launch powers must be finite and non-negative");
  }
  // Fixed-order sum keeps the total reproducible.
  total_power_w_ = std::accumulate(power_w_.begin(), power_w_.end(), 0.0);
}

SpectralLoad SpectralLoad::uniform(std::size_t channel_count, double power_w) {
  return SpectralLoad(std::vector<double>(channel_count, power_w));
}

std::size_t SpectralLoad::occupied_count() const {
  return static_cast<std::size_t>(
      std::count_if(power_w_.begin(), power_w_.end(), [](double p) { return p > 0.0; }));
}

double SpectralLoad::psd_at(const ChannelGrid& grid, double f_thz) const {
  const auto slot = grid.slot_containing(f_thz);
  if (!slot) return 0.0;
  return power_w_[*slot] / grid.channel_bandwidth_thz();
}

std::vector<ChannelBand> occupied_bands(const ChannelGrid& grid, const SpectralLoad& load) {
  if (load.slot_count() != grid.channel_count())
    throw std::invalid_argument("load does not match grid slot count");
  std::vector<ChannelBand> bands;
  for (std::size_t i = 0; i < load.slot_count(); ++i) {
    if (load.occupied(i))
      bands.push_back({grid.center(i), grid.channel_bandwidth_thz(), load.power_w(i)});
  }
  return bands;
}

Link::Link(ChannelGrid grid, std::vector<Span> spans) : grid_(std::move(grid)), spans_(std::move(spans)) {
  if (spans_.empty()) throw std::invalid_argument("link: at least one span required");
  double acc = 0.0;
  for (const Span& s : spans_) {
    if (!(s.length_km > 0.0)) throw std::invalid_argument("link: span lengths must be > 0");
    if (s.load.slot_count() != grid_.channel_count())
      throw std::invalid_argument("link: span load does not match grid");
    s.fiber.validate();
    cumulative_km_.push_back(acc);
    acc += s.length_km;
  }
}

double Link::total_length_km() const { return cumulative_km_.back() + spans_.back().length_km; }

Link Link::prefix(std::size_t count) const {
  if (count == 0 || count > spans_.size()) throw std::out_of_range("link prefix: bad span count");
  return Link(grid_, std::vector<Span>(spans_.begin(), spans_.begin() + static_cast<long>(count)));
}

std::vector<double> default_span_lengths_km() { return std::vector<double>(6, 742.0 / 6.0); }

Link build_ptp_scenario(const ChannelGrid& grid, double per_channel_power_dbm,
                        const std::vector<double>& span_lengths_km, const FiberSpec& fiber) {
  if (span_lengths_km.empty()) throw std::invalid_argument("ptp scenario: empty span list");
  const double p = dbm_to_watt(per_channel_power_dbm);
  if (!std::isfinite(p) || !(p > 0.0))
    throw std::invalid_argument("ptp scenario: per-channel power must be positive and finite");
  const SpectralLoad load = SpectralLoad::uniform(grid.channel_count(), p);
  std::vector<Span> spans;
  spans.reserve(span_lengths_km.size());
  for (double len : span_lengths_km) spans.push_back({len, fiber, load});
  return Link(grid, std::move(spans));
}

std::size_t NetworkLoadPlan::SpanState::occupied_count() const {
  return static_cast<std::size_t>(
      std::count_if(lightpath.begin(), lightpath.end(), [](std::uint32_t id) { return id != 0; }));
}

bool NetworkLoadPlan::is_signal(std::size_t slot) const {
  return std::binary_search(signal_channels.begin(), signal_channels.end(), slot);
}

NetworkLoadPlan build_network_plan(const ChannelGrid& grid, std::size_t signal_stride,
                                   double drop_fraction, double utilization, std::uint64_t seed,
                                   std::size_t span_count) {
  if (signal_stride < 1) throw std::invalid_argument("network plan: stride must be >= 1");
  if (!(drop_fraction >= 0.0 && drop_fraction <= 1.0))
    throw std::invalid_argument("network plan: drop fraction must be in [0, 1]");
  if (!(utilization > 0.0 && utilization <= 1.0))
    throw std::invalid_argument("network plan: utilization must be in (0, 1]");
  if (span_count < 1) throw std::invalid_argument("network plan: at least one span required");

  NetworkLoadPlan plan;
  plan.rng_algorithm = std::string(RandomSource::kAlgorithm);
  plan.seed = seed;
  plan.channel_count = grid.channel_count();
  plan.signal_stride = signal_stride;
  plan.drop_fraction = drop_fraction;
  plan.utilization = utilization;
  plan.target_occupied =
      static_cast<std::size_t>(std::llround(utilization * static_cast<double>(plan.channel_count)));
  for (std::size_t i = 0; i < plan.channel_count; i += signal_stride) plan.signal_channels.push_back(i);
  if (plan.target_occupied < plan.signal_channels.size())
    throw std::invalid_argument("network plan: utilization is below the signal-channel fraction");

  RandomSource rng(seed);
  const std::size_t n = plan.channel_count;
  std::uint32_t next_id = 1;

  NetworkLoadPlan::SpanState state;
  state.lightpath.assign(n, 0);
  state.power_offset_db.assign(n, 0.0);
  state.predispersion_km.assign(n, 0.0);
  for (std::size_t s : plan.signal_channels) state.lightpath[s] = next_id++;

  auto fill = [&](NetworkLoadPlan::SpanState& st) {
    std::vector<std::size_t> empty;
    for (std::size_t i = 0; i < n; ++i)
      if (!st.occupied(i)) empty.push_back(i);
    const std::size_t missing = plan.target_occupied - st.occupied_count();
    for (std::size_t slot : rng.sample(std::move(empty), missing)) {
      st.lightpath[slot] = next_id++;
      st.power_offset_db[slot] = rng.uniform(-1.0, 1.0);
      st.predispersion_km[slot] = rng.uniform(0.0, 1000.0);
    }
  };

  fill(state);
  plan.spans.push_back(state);
  for (std::size_t k = 1; k < span_count; ++k) {
    std::vector<std::size_t> interferers;
    for (std::size_t i = 0; i < n; ++i)
      if (state.occupied(i) && !plan.is_signal(i)) interferers.push_back(i);
    const auto drop_count = static_cast<std::size_t>(
        std::floor(drop_fraction * static_cast<double>(interferers.size())));
    for (std::size_t slot : rng.sample(std::move(interferers), drop_count)) {
      state.lightpath[slot] = 0;
      state.power_offset_db[slot] = 0.0;
      state.predispersion_km[slot] = 0.0;
    }
    fill(state);
    plan.spans.push_back(state);
  }
  return plan;
}

SpectralLoad load_at_span(const NetworkLoadPlan& plan, std::size_t k, double base_power_dbm) {
  if (k >= plan.spans.size()) throw std::out_of_range("load_at_span: span index out of range");
  const auto& st = plan.spans[k];
  std::vector<double> p(plan.channel_count, 0.0);
  for (std::size_t i = 0; i < plan.channel_count; ++i) {
    if (st.occupied(i)) p[i] = dbm_to_watt(base_power_dbm + st.power_offset_db[i]);
  }
  return SpectralLoad(std::move(p));
}

Link build_network_link(const ChannelGrid& grid, const NetworkLoadPlan& plan, double base_power_dbm,
                        const std::vector<double>& span_lengths_km, const FiberSpec& fiber) {
  if (plan.channel_count != grid.channel_count())
    throw std::invalid_argument("network link: plan does not match grid");
  if (span_lengths_km.size() != plan.span_count())
    throw std::invalid_argument("network link: span length count does not match plan");
  std::vector<Span> spans;
  for (std::size_t k = 0; k < plan.span_count(); ++k)
    spans.push_back({span_lengths_km[k], fiber, load_at_span(plan, k, base_power_dbm)});
  return Link(grid, std::move(spans));
}

}  // namespace isrsgn
