#pragma once

#include <cstddef>
#include <vector>

#include "isrsgn/gn_engine.hpp"
#include "isrsgn/scenario_io.hpp"

namespace isrsgn {

/// Two-polarization ASE PSD (W/Hz) of one amplifier: (G - 1) 10^(NF/10) h f.
/// Throws std::invalid_argument for gain below 0 dB.
double edfa_noise_psd(double gain_db, double nf_db, double f_abs_hz);

struct LaunchSweepOptions {
  double nf_db = 5.0;
  bool include_nli = true;
  bool include_ase = true;
  unsigned threads = 0;
};

struct LaunchPoint {
  double power_dbm;
  double sigma2_ase_w;
  double sigma2_nli_w;
  double snr_db;
};

/// SNR of `channel` for each uniform launch power. Every span is followed by an
/// amplifier compensating its loss exactly. The scenario's own load pattern is
/// kept; only the base power changes.
std::vector<LaunchPoint> launch_sweep(const Scenario& scenario, const QuadratureSpec& quad, std::size_t channel,
                                      const std::vector<double>& power_grid_dbm,
                                      const LaunchSweepOptions& options = {});

/// Grid point of highest SNR. Throws std::invalid_argument on an empty sweep.
double optimal_launch(const std::vector<LaunchPoint>& sweep);

double optimal_launch(const Scenario& scenario, const QuadratureSpec& quad, std::size_t channel,
                      const std::vector<double>& power_grid_dbm, const LaunchSweepOptions& options = {});

}  // namespace isrsgn
