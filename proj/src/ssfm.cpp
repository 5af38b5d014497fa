#include "isrsgn/ssfm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "isrsgn/errors.hpp"
#include "isrsgn/gn_engine.hpp"
#include "isrsgn/parallel.hpp"
#include "isrsgn/raman.hpp"
#include "isrsgn/rng.hpp"
#include "isrsgn/units.hpp"

namespace isrsgn {

namespace {

using cplx = std::complex<double>;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// beta(omega) - beta0 - beta1 omega per km, omega = 2 pi f in rad/ps.
double propagation_constant(double f_thz, const DispersionCoeffs& d) {
  const double w = 2.0 * kPi * f_thz;
  return 0.5 * d.beta2_ps2_per_km * w * w + d.beta3_ps3_per_km * w * w * w / 6.0;
}

void apply_dispersion(OpticalField& field, double length_km, const FiberSpec& fiber) {
  const DispersionCoeffs d = dispersion_coeffs(fiber);
  for (std::size_t k = 0; k < field.size(); ++k) {
    const cplx h = std::polar(1.0, -propagation_constant(field.bin_frequency(k), d) * length_km);
    field.x[k] *= h;
    field.y[k] *= h;
  }
}

double occupied_band_thz(const ChannelGrid& grid, const std::vector<SpectralLoad>& loads) {
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  const double half = 0.5 * grid.channel_bandwidth_thz();
  for (const auto& load : loads) {
    for (std::size_t i = 0; i < grid.channel_count(); ++i) {
      if (!load.occupied(i)) continue;
      lo = any ? std::min(lo, grid.center(i) - half) : grid.center(i) - half;
      hi = any ? std::max(hi, grid.center(i) + half) : grid.center(i) + half;
      any = true;
    }
  }
  return hi - lo;
}

std::uint64_t realization_seed(std::uint64_t seed, int r) {
  return seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(r + 1);
}

ChannelSymbols draw_symbols(const SymbolSource& source, RandomSource& rng, std::size_t count) {
  ChannelSymbols s;
  s.x.resize(count);
  s.y.resize(count);
  for (auto& v : s.x) v = source.draw(rng);
  for (auto& v : s.y) v = source.draw(rng);
  return s;
}

}  // namespace

void SimulationSpec::validate() const {
  if (!is_power_of_two(symbols)) throw ConfigError("simulation: symbols must be a power of two");
  if (realizations < 1) throw ConfigError("simulation: realizations must be >= 1");
  if (samples_per_symbol < 1 || !is_power_of_two(static_cast<std::size_t>(samples_per_symbol)))
    throw ConfigError("simulation: samples_per_symbol must be a power of two");
  if (steps_per_span < 1) throw ConfigError("simulation: steps_per_span must be >= 1");
}

std::vector<double> log_step_boundaries(double alpha_np_per_km, double length_km, int steps) {
  if (steps < 1) throw std::invalid_argument("step plan: at least one step required");
  if (!(length_km > 0.0) || !(alpha_np_per_km > 0.0))
    throw std::invalid_argument("step plan: length and attenuation must be positive");
  std::vector<double> z(static_cast<std::size_t>(steps) + 1);
  const double loss = -std::expm1(-alpha_np_per_km * length_km);
  for (int m = 0; m <= steps; ++m)
    z[static_cast<std::size_t>(m)] = -std::log1p(-(static_cast<double>(m) / steps) * loss) / alpha_np_per_km;
  z.front() = 0.0;
  z.back() = length_km;
  return z;
}

double OpticalField::bin_frequency(std::size_t k) const {
  return static_cast<double>(fft_bin_index(k, size())) * bin_spacing_thz();
}

double OpticalField::total_power_w() const {
  double p = 0.0;
  for (std::size_t k = 0; k < size(); ++k) p += std::norm(x[k]) + std::norm(y[k]);
  const double n = static_cast<double>(size());
  return p / (n * n);
}

FieldLayout::FieldLayout(const ChannelGrid& grid, std::size_t symbols, int samples_per_symbol)
    : size_(symbols * static_cast<std::size_t>(samples_per_symbol)),
      symbols_(symbols),
      sample_rate_thz_(samples_per_symbol * grid.symbol_rate_gbd() * 1e-3) {
  const double df = sample_rate_thz_ / static_cast<double>(size_);
  const long half_n = static_cast<long>(size_ / 2);
  const long half_s = static_cast<long>(symbols / 2);
  for (std::size_t i = 0; i < grid.channel_count(); ++i) {
    const double pos = grid.center(i) / df;
    const long c = std::lround(pos);
    if (std::abs(pos - static_cast<double>(c)) > 1e-6)
      throw AliasingError("ssfm: channel " + std::to_string(i) + " center is not on the frequency bin grid");
    if (c - half_s < -half_n || c + half_s > half_n)
      throw AliasingError("ssfm: channel band exceeds the sampled bandwidth of " + std::to_string(sample_rate_thz_) +
                          " THz");
    center_bin_.push_back(c);
  }
}

std::vector<std::size_t> FieldLayout::channel_bins(std::size_t i) const {
  const long c = center_bin_.at(i);
  const long n = static_cast<long>(size_);
  const long half_s = static_cast<long>(symbols_ / 2);
  std::vector<std::size_t> bins;
  bins.reserve(symbols_);
  for (long m = -half_s; m < half_s; ++m) bins.push_back(static_cast<std::size_t>(((c + m) % n + n) % n));
  return bins;
}

void add_channel(OpticalField& field, const FieldLayout& layout, const ChannelGrid& /*grid*/, std::size_t i,
                 const ChannelSymbols& symbols, double power_w, double predispersion_km, const FiberSpec& fiber) {
  const std::size_t s = layout.symbols();
  if (symbols.x.size() != s || symbols.y.size() != s) throw std::invalid_argument("add_channel: symbol count mismatch");
  if (!(power_w > 0.0)) throw std::invalid_argument("add_channel: power must be positive");
  const Fft fft(s);
  std::vector<cplx> sx = symbols.x;
  std::vector<cplx> sy = symbols.y;
  fft.forward(sx);
  fft.forward(sy);
  const auto bins = layout.channel_bins(i);
  double energy = 0.0;
  for (std::size_t m = 0; m < s; ++m) energy += std::norm(sx[m]) + std::norm(sy[m]);
  const double n = static_cast<double>(layout.size());
  const double scale = std::sqrt(power_w * n * n / energy);
  const DispersionCoeffs d = dispersion_coeffs(fiber);
  // Bin order of the channel spectrum: m in [-s/2, s/2) maps to sx[m mod s].
  for (std::size_t j = 0; j < s; ++j) {
    const long m = static_cast<long>(j) - static_cast<long>(s / 2);
    const std::size_t src = static_cast<std::size_t>((m + static_cast<long>(s)) % static_cast<long>(s));
    const std::size_t k = bins[j];
    cplx h = scale;
    if (predispersion_km != 0.0) h *= std::polar(1.0, -propagation_constant(field.bin_frequency(k), d) * predispersion_km);
    field.x[k] = sx[src] * h;
    field.y[k] = sy[src] * h;
  }
}

void clear_channel(OpticalField& field, const FieldLayout& layout, std::size_t i) {
  for (std::size_t k : layout.channel_bins(i)) {
    field.x[k] = 0.0;
    field.y[k] = 0.0;
  }
}

std::vector<double> channel_powers(const OpticalField& field, const FieldLayout& layout, std::size_t channels) {
  const double n = static_cast<double>(field.size());
  std::vector<double> out(channels, 0.0);
  for (std::size_t i = 0; i < channels; ++i) {
    double p = 0.0;
    for (std::size_t k : layout.channel_bins(i)) p += std::norm(field.x[k]) + std::norm(field.y[k]);
    out[i] = p / (n * n);
  }
  return out;
}

OpticalField transmit(const ChannelGrid& grid, const SpectralLoad& load, const ModulationSpec& modulation,
                      const SimulationSpec& sim, RandomSource& rng, std::vector<ChannelSymbols>& symbols,
                      const FiberSpec& fiber, const std::vector<double>& predispersion_km) {
  sim.validate();
  if (load.slot_count() != grid.channel_count()) throw std::invalid_argument("transmit: load does not match grid");
  const FieldLayout layout(grid, sim.symbols, sim.samples_per_symbol);
  OpticalField field;
  field.sample_rate_thz = layout.sample_rate_thz();
  field.x.assign(layout.size(), 0.0);
  field.y.assign(layout.size(), 0.0);
  const SymbolSource source(modulation);
  symbols.assign(grid.channel_count(), {});
  for (std::size_t i = 0; i < grid.channel_count(); ++i) {
    if (!load.occupied(i)) continue;
    symbols[i] = draw_symbols(source, rng, sim.symbols);
    const double pre = predispersion_km.empty() ? 0.0 : predispersion_km.at(i);
    add_channel(field, layout, grid, i, symbols[i], load.power_w(i), pre, fiber);
  }
  return field;
}

void propagate_span(OpticalField& field, double length_km, const FiberSpec& fiber, int steps, const Fft* fft) {
  fiber.validate();
  const std::size_t n = field.size();
  const double alpha = fiber.alpha_np_per_km();
  const double cr = fiber.raman_slope_per_w_thz_km;
  const double gamma = fiber.gamma_per_w_km;
  if (gamma > 0.0 && (!fft || fft->size() != n)) throw std::invalid_argument("propagate_span: FFT plan required");
  const DispersionCoeffs d = dispersion_coeffs(fiber);
  const auto z = log_step_boundaries(alpha, length_km, steps);

  std::vector<double> freq(n);
  std::vector<double> beta(n);
  for (std::size_t k = 0; k < n; ++k) {
    freq[k] = field.bin_frequency(k);
    beta[k] = propagation_constant(freq[k], d);
  }
  const double norm = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  std::vector<double> gain(n);

  auto linear = [&](double h) {
    if (h <= 0.0) return;
    double total = 0.0;
    double weighted = 0.0;
    double t = 0.0;
    if (cr > 0.0) {
      for (std::size_t k = 0; k < n; ++k) total += (std::norm(field.x[k]) + std::norm(field.y[k])) * norm;
      t = cr * total * effective_length(h, alpha);
      for (std::size_t k = 0; k < n; ++k) {
        gain[k] = std::exp(-t * freq[k]);
        weighted += (std::norm(field.x[k]) + std::norm(field.y[k])) * norm * gain[k];
      }
    }
    const double loss = std::exp(-alpha * h);
    const bool raman = cr > 0.0 && total > 0.0 && weighted > 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double power_ratio = raman ? loss * gain[k] * total / weighted : loss;
      const cplx op = std::polar(std::sqrt(power_ratio), -beta[k] * h);
      field.x[k] *= op;
      field.y[k] *= op;
    }
  };

  auto nonlinear = [&](double h) {
    const double l_nl = 2.0 * std::sinh(0.5 * alpha * h) / alpha;
    const double k_phase = -(8.0 / 9.0) * gamma * l_nl;
    fft->inverse(field.x);
    fft->inverse(field.y);
    for (std::size_t k = 0; k < n; ++k) {
      const double p = std::norm(field.x[k]) + std::norm(field.y[k]);
      const cplx r = std::polar(1.0, k_phase * p);
      field.x[k] *= r;
      field.y[k] *= r;
    }
    fft->forward(field.x);
    fft->forward(field.y);
  };

  if (gamma <= 0.0) {
    // Linear propagation: each step is one exact ISRS/dispersion update.
    for (std::size_t m = 0; m + 1 < z.size(); ++m) linear(z[m + 1] - z[m]);
    return;
  }
  // Symmetric splitting with merged half-steps:
  // L(d0/2) N0 L((d0+d1)/2) N1 ... N_{M-1} L(d_{M-1}/2)
  double pending = 0.0;
  for (std::size_t m = 0; m + 1 < z.size(); ++m) {
    const double h = z[m + 1] - z[m];
    linear(pending + 0.5 * h);
    nonlinear(h);
    pending = 0.5 * h;
  }
  linear(pending);
}

void gain_stage(OpticalField& field, const FieldLayout& layout, GainMode mode, const std::vector<double>& target_powers_w) {
  const std::vector<double> current = channel_powers(field, layout, target_powers_w.size());
  if (mode == GainMode::flat) {
    double target = 0.0;
    double now = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
      if (target_powers_w[i] <= 0.0) continue;
      target += target_powers_w[i];
      now += current[i];
    }
    if (now <= 0.0) return;
    const double g = std::sqrt(target / now);
    for (std::size_t k = 0; k < field.size(); ++k) {
      field.x[k] *= g;
      field.y[k] *= g;
    }
    return;
  }
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (target_powers_w[i] <= 0.0 || current[i] <= 0.0) continue;
    const double g = std::sqrt(target_powers_w[i] / current[i]);
    for (std::size_t k : layout.channel_bins(i)) {
      field.x[k] *= g;
      field.y[k] *= g;
    }
  }
}

void compensate_dispersion(OpticalField& field, double length_km, const FiberSpec& fiber) {
  apply_dispersion(field, -length_km, fiber);
}

double ReceivedChannel::snr_db() const { return linear_to_db(signal_energy / error_energy); }

ReceivedChannel receive_channel(const OpticalField& field, const FieldLayout& layout, std::size_t i,
                                const ChannelSymbols& sent) {
  const std::size_t s = layout.symbols();
  if (sent.x.size() != s || sent.y.size() != s)
    throw std::invalid_argument("receive_channel: transmitted symbols of channel " + std::to_string(i) + " unknown");
  const Fft fft(s);
  const auto bins = layout.channel_bins(i);
  ReceivedChannel out;
  for (int pol = 0; pol < 2; ++pol) {
    const auto& spectrum = pol == 0 ? field.x : field.y;
    const auto& x = pol == 0 ? sent.x : sent.y;
    std::vector<cplx> y(s);
    for (std::size_t j = 0; j < s; ++j) {
      const long m = static_cast<long>(j) - static_cast<long>(s / 2);
      y[static_cast<std::size_t>((m + static_cast<long>(s)) % static_cast<long>(s))] = spectrum[bins[j]];
    }
    fft.inverse(y);
    cplx cross = 0.0;
    double energy = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      cross += y[j] * std::conj(x[j]);
      energy += std::norm(x[j]);
    }
    const cplx h = cross / energy;
    double err = 0.0;
    for (std::size_t j = 0; j < s; ++j) err += std::norm(y[j] / h - x[j]);
    out.signal_energy += energy;
    out.error_energy += err;
  }
  return out;
}

SsfmReport run_ssfm(const Scenario& scenario, const ModulationSpec& modulation, const SimulationSpec& sim,
                    std::optional<std::size_t> span_count) {
  sim.validate();
  const ChannelGrid grid = scenario.grid();
  const Link full_link = scenario.link();
  const std::size_t spans = span_count.value_or(full_link.span_count());
  if (spans < 1 || spans > full_link.span_count()) throw ConfigError("ssfm: span count out of range");
  const Link link = full_link.prefix(spans);
  const bool network = scenario.load.mode == LoadMode::network;
  const NetworkLoadPlan plan = network ? scenario.network_plan() : NetworkLoadPlan{};

  std::vector<SpectralLoad> loads;
  for (const Span& s : link.spans()) loads.push_back(s.load);
  const FieldLayout layout(grid, sim.symbols, sim.samples_per_symbol);
  if (scenario.fiber.gamma_per_w_km > 0.0 && layout.sample_rate_thz() < 2.0 * occupied_band_thz(grid, loads))
    throw AliasingError("ssfm: sample rate " + std::to_string(layout.sample_rate_thz()) +
                        " THz is below twice the occupied band; mixing products would alias");

  const std::vector<std::size_t> signals = scenario.signal_channels();
  const Fft fft(layout.size());
  std::vector<std::vector<ReceivedChannel>> received(static_cast<std::size_t>(sim.realizations));

  parallel_for(received.size(), sim.threads, [&](std::size_t r) {
    RandomSource rng(realization_seed(sim.seed, static_cast<int>(r)));
    const SymbolSource source(modulation);
    std::vector<ChannelSymbols> symbols;
    std::vector<double> pre;
    if (network) {
      pre.assign(grid.channel_count(), 0.0);
      for (std::size_t i = 0; i < grid.channel_count(); ++i)
        if (!plan.is_signal(i)) pre[i] = plan.spans[0].predispersion_km[i];
    }
    OpticalField field = transmit(grid, loads[0], modulation, sim, rng, symbols, scenario.fiber, pre);
    for (std::size_t k = 0; k < spans; ++k) {
      if (k > 0 && network) {
        const auto& before = plan.spans[k - 1];
        const auto& now = plan.spans[k];
        for (std::size_t i = 0; i < grid.channel_count(); ++i) {
          if (before.lightpath[i] == now.lightpath[i]) continue;
          clear_channel(field, layout, i);
          symbols[i] = {};
          if (!now.occupied(i)) continue;
          symbols[i] = draw_symbols(source, rng, sim.symbols);
          add_channel(field, layout, grid, i, symbols[i], loads[k].power_w(i), now.predispersion_km[i],
                      scenario.fiber);
        }
      }
      propagate_span(field, link.span(k).length_km, link.span(k).fiber, sim.steps_per_span, &fft);
      gain_stage(field, layout, sim.gain, loads[k].powers_w());
    }
    compensate_dispersion(field, link.total_length_km(), scenario.fiber);
    for (std::size_t i : signals) received[r].push_back(receive_channel(field, layout, i, symbols[i]));
  });

  SsfmReport report;
  for (std::size_t j = 0; j < signals.size(); ++j) {
    ReceivedChannel pooled;
    for (const auto& rx : received) {
      pooled.signal_energy += rx[j].signal_energy;
      pooled.error_energy += rx[j].error_energy;
    }
    const std::size_t i = signals[j];
    report.entries.push_back({i, grid.center(i), loads[0].power_w(i), pooled.snr_db()});
  }
  return report;
}

std::vector<double> linear_span_output_powers(const ChannelGrid& grid, const SpectralLoad& load, double length_km,
                                              const FiberSpec& fiber, const SimulationSpec& sim) {
  FiberSpec linear = fiber;
  linear.gamma_per_w_km = 0.0;
  RandomSource rng(sim.seed);
  std::vector<ChannelSymbols> symbols;
  OpticalField field = transmit(grid, load, ModulationSpec{}, sim, rng, symbols, linear);
  propagate_span(field, length_km, linear, sim.steps_per_span, nullptr);
  return channel_powers(field, FieldLayout(grid, sim.symbols, sim.samples_per_symbol), grid.channel_count());
}

}  // namespace isrsgn
