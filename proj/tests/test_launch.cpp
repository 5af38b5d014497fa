#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isrsgn/launch.hpp"
#include "isrsgn/units.hpp"

using namespace isrsgn;

namespace {

Scenario desk() {
  Scenario sc;
  sc.channel_count = 5;
  sc.spacing_thz = 0.0125;
  sc.symbol_rate_gbd = 10.0;
  sc.span_lengths_km = {100.0, 100.0};
  return sc;
}

std::vector<double> grid() {
  std::vector<double> g;
  for (int i = 0; i <= 12; ++i) g.push_back(-3.0 + 0.5 * i);
  return g;
}

}  // namespace

TEST_CASE("amplifier noise psd") {
  // h f (G - 1) NF at 193.4 THz, 20 dB gain, NF 5 dB
  const double expect = 6.62607015e-34 * 193.4e12 * 99.0 * std::pow(10.0, 0.5);
  CHECK(edfa_noise_psd(20.0, 5.0, 193.4e12) == doctest::Approx(expect));
  CHECK(edfa_noise_psd(20.0, 5.0, 193.4e12) == doctest::Approx(3.9e-17).epsilon(0.03));
  CHECK(edfa_noise_psd(0.0, 5.0, 193.4e12) == 0.0);
  CHECK(edfa_noise_psd(20.0, 6.0, 193.4e12) > edfa_noise_psd(20.0, 5.0, 193.4e12));
  CHECK_THROWS(edfa_noise_psd(-1.0, 5.0, 193.4e12));
}

TEST_CASE("sweep limits") {
  QuadratureSpec q;
  q.channel_points = 1;
  LaunchSweepOptions ase_only;
  ase_only.include_nli = false;
  CHECK(optimal_launch(desk(), q, 2, grid(), ase_only) == doctest::Approx(3.0));
  LaunchSweepOptions nli_only;
  nli_only.include_ase = false;
  CHECK(optimal_launch(desk(), q, 2, grid(), nli_only) == doctest::Approx(-3.0));
  CHECK_THROWS(optimal_launch(std::vector<LaunchPoint>{}));
}

TEST_CASE("sweep points are consistent") {
  QuadratureSpec q;
  q.channel_points = 1;
  const auto sweep = launch_sweep(desk(), q, 2, {-1.0, 0.0, 1.0});
  REQUIRE(sweep.size() == 3);
  for (const auto& p : sweep) {
    CHECK(p.snr_db == doctest::Approx(linear_to_db(dbm_to_watt(p.power_dbm) / (p.sigma2_ase_w + p.sigma2_nli_w))));
    CHECK(p.sigma2_ase_w == doctest::Approx(sweep[0].sigma2_ase_w));
  }
  // two 20 dB spans, NF 5 dB, 10 GHz
  const double f_abs = kSpeedOfLightKmPerS * 1e3 / 1550e-9;
  CHECK(sweep[0].sigma2_ase_w == doctest::Approx(2.0 * edfa_noise_psd(20.0, 5.0, f_abs) * 10e9).epsilon(1e-6));
  CHECK(sweep[2].sigma2_nli_w / sweep[0].sigma2_nli_w == doctest::Approx(std::pow(10.0, 0.6)).epsilon(0.01));
}
