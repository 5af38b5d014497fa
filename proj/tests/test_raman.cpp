#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isrsgn/raman.hpp"
#include "isrsgn/scenario.hpp"
#include "isrsgn/units.hpp"

using namespace isrsgn;

namespace {

RamanProfile full_cl(double cr = 0.028) {
  FiberSpec fiber;
  fiber.raman_slope_per_w_thz_km = cr;
  const ChannelGrid g(251, 0.04, 40.0);
  return RamanProfile(g, SpectralLoad::uniform(251, 1e-3), fiber);
}

// Independent oracle: rho by midpoint integration of the denominator.
double rho_numeric(const std::vector<ChannelBand>& bands, double alpha, double cr, double f, double z) {
  const double leff = (1.0 - std::exp(-alpha * z)) / alpha;
  double p = 0.0;
  for (const auto& b : bands) p += b.power_w;
  const double t = p * cr * leff;
  double den = 0.0;
  for (const auto& b : bands) {
    const int n = 2000;
    const double h = b.bandwidth_thz / n;
    for (int i = 0; i < n; ++i) {
      const double v = b.center_thz - 0.5 * b.bandwidth_thz + (i + 0.5) * h;
      den += b.psd() * std::exp(-t * v) * h;
    }
  }
  return p * std::exp(-alpha * z) * std::exp(-t * f) / den;
}

}  // namespace

TEST_CASE("effective length") {
  const double a = alpha_db_to_np(0.2);
  CHECK(a == doctest::Approx(0.04605).epsilon(1e-3));
  CHECK(effective_length(0.0, a) == 0.0);
  CHECK(effective_length(100.0, a) == doctest::Approx(21.50).epsilon(1e-3));
  CHECK(effective_length(1e5, a) == doctest::Approx(1.0 / a));
  CHECK(effective_length(1e5, a) == doctest::Approx(21.71).epsilon(1e-3));
  CHECK_THROWS(effective_length(-1.0, a));
  CHECK_THROWS(effective_length(1.0, 0.0));
}

TEST_CASE("raman-free profile is plain attenuation") {
  const RamanProfile p = full_cl(0.0);
  const double a = alpha_db_to_np(0.2);
  for (double f : {-5.0, -1.3, 0.0, 4.9})
    for (double z : {0.0, 10.0, 100.0}) CHECK(isrs_gain(p, f, z) == doctest::Approx(std::exp(-a * z)).epsilon(1e-14));
  CHECK(tilt_db(p, 100.0) == doctest::Approx(0.0));
}

TEST_CASE("rho starts at one and conserves total power") {
  const RamanProfile p = full_cl();
  const double a = p.alpha_np_per_km();
  for (double f : {-5.0, 0.0, 5.0}) CHECK(isrs_gain(p, f, 0.0) == doctest::Approx(1.0));
  for (double z : {5.0, 50.0, 100.0}) {
    double out = 0.0;
    for (const auto& b : p.bands()) {
      // integrate rho over each band
      const int n = 64;
      for (int i = 0; i < n; ++i) {
        const double v = b.center_thz - 0.5 * b.bandwidth_thz + (i + 0.5) * b.bandwidth_thz / n;
        out += b.psd() * isrs_gain(p, v, z) * b.bandwidth_thz / n;
      }
    }
    CHECK(out == doctest::Approx(p.total_power_w() * std::exp(-a * z)).epsilon(1e-6));
  }
}

TEST_CASE("rho matches numeric denominator") {
  FiberSpec fiber;
  const ChannelGrid g(7, 0.1, 64.0);
  const SpectralLoad load({2e-3, 1e-3, 0.0, 5e-3, 1e-3, 0.0, 3e-3});
  const RamanProfile p(g, load, fiber);
  for (double f : {-0.3, -0.05, 0.1, 0.31})
    for (double z : {20.0, 80.0})
      CHECK(isrs_gain(p, f, z) ==
            doctest::Approx(rho_numeric(p.bands(), p.alpha_np_per_km(), fiber.raman_slope_per_w_thz_km, f, z))
                .epsilon(1e-6));
}

TEST_CASE("low frequencies gain power") {
  const RamanProfile p = full_cl();
  CHECK(isrs_gain(p, -5.0, 100.0) > isrs_gain(p, 5.0, 100.0));
  CHECK(tilt_db(p, 100.0) > 0.0);
  CHECK(tilt_db(p, 50.0) < tilt_db(p, 100.0));
}

TEST_CASE("full C+L tilt near the small-signal estimate") {
  const RamanProfile p = full_cl();
  const double tilt = tilt_db(p, 100.0);
  // first-order triangular-gain estimate, 4.343 P Cr Btot Leff, on the center span
  const double a = alpha_db_to_np(0.2);
  const double estimate = kDbPerNeper * 0.251 * 0.028 * 10.0 * effective_length(100.0, a);
  CHECK(tilt == doctest::Approx(6.5).epsilon(0.3 / 6.5));
  CHECK(std::abs(tilt - estimate) < 0.3);
}

TEST_CASE("decay rate is the derivative of log gain") {
  const RamanProfile p = full_cl();
  for (double f : {-4.0, 0.0, 3.0})
    for (double z : {1.0, 40.0, 90.0}) {
      const double h = 1e-4;
      const double fd = -(p.log_gain(f, z + h) - p.log_gain(f, z - h)) / (2 * h);
      CHECK(p.decay_rate(f, z) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("tilt needs two channels") {
  FiberSpec fiber;
  const RamanProfile p(ChannelGrid(3, 0.05, 32.0), SpectralLoad({0.0, 1e-3, 0.0}), fiber);
  CHECK_THROWS(tilt_db(p, 100.0));
}
