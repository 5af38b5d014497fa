#include "isrsgn/launch.hpp"

#include <algorithm>
#include <stdexcept>

#include "isrsgn/parallel.hpp"
#include "isrsgn/units.hpp"

namespace isrsgn {

double edfa_noise_psd(double gain_db, double nf_db, double f_abs_hz) {
  if (gain_db < 0.0) throw std::invalid_argument("edfa_noise_psd: gain must be >= 1 (0 dB)");
  if (!(f_abs_hz > 0.0)) throw std::invalid_argument("edfa_noise_psd: frequency must be positive");
  return (db_to_linear(gain_db) - 1.0) * db_to_linear(nf_db) * kPlanck * f_abs_hz;
}

std::vector<LaunchPoint> launch_sweep(const Scenario& scenario, const QuadratureSpec& quad, std::size_t channel,
                                      const std::vector<double>& power_grid_dbm, const LaunchSweepOptions& options) {
  const ChannelGrid grid = scenario.grid();
  if (channel >= grid.channel_count()) throw std::out_of_range("launch_sweep: channel index out of range");
  const double f_abs_hz = (wavelength_nm_to_thz(scenario.fiber.ref_wavelength_nm) + grid.center(channel)) * 1e12;
  const double bandwidth_hz = grid.symbol_rate_gbd() * 1e9;
  double ase_psd = 0.0;
  for (double length : scenario.span_lengths_km)
    ase_psd += edfa_noise_psd(scenario.fiber.alpha_db_per_km * length, options.nf_db, f_abs_hz);

  std::vector<LaunchPoint> out(power_grid_dbm.size());
  parallel_for(power_grid_dbm.size(), options.threads, [&](std::size_t i) {
    LaunchPoint& p = out[i];
    p.power_dbm = power_grid_dbm[i];
    const Link link = scenario.link_at_power(p.power_dbm);
    p.sigma2_ase_w = options.include_ase ? ase_psd * bandwidth_hz : 0.0;
    p.sigma2_nli_w = options.include_nli ? NliEngine(link, quad).channel_sigma2(channel) : 0.0;
    const double noise = p.sigma2_ase_w + p.sigma2_nli_w;
    p.snr_db = linear_to_db(link.span(0).load.power_w(channel) / noise);
  });
  return out;
}

double optimal_launch(const std::vector<LaunchPoint>& sweep) {
  if (sweep.empty()) throw std::invalid_argument("optimal_launch: empty power grid");
  auto best = std::max_element(sweep.begin(), sweep.end(),
                               [](const LaunchPoint& a, const LaunchPoint& b) { return a.snr_db < b.snr_db; });
  return best->power_dbm;
}

double optimal_launch(const Scenario& scenario, const QuadratureSpec& quad, std::size_t channel,
                      const std::vector<double>& power_grid_dbm, const LaunchSweepOptions& options) {
  if (power_grid_dbm.empty()) throw std::invalid_argument("optimal_launch: empty power grid");
  return optimal_launch(launch_sweep(scenario, quad, channel, power_grid_dbm, options));
}

}  // namespace isrsgn
