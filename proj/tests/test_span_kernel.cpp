#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "isrsgn/dispersion.hpp"
#include "isrsgn/gn_engine.hpp"
#include "isrsgn/quadrature_rules.hpp"
#include "isrsgn/raman.hpp"
#include "isrsgn/rng.hpp"
#include "isrsgn/span_kernel.hpp"
#include "isrsgn/units.hpp"

using namespace isrsgn;
using cplx = std::complex<double>;

namespace {

RamanProfile cl_profile(double cr) {
  FiberSpec fiber;
  fiber.raman_slope_per_w_thz_km = cr;
  return RamanProfile(ChannelGrid(251, 0.04, 40.0), SpectralLoad::uniform(251, 1e-3), fiber);
}

// Composite Simpson on a fine uniform grid with one Richardson step, independent
// of the panel logic.
cplx brute_force(const RamanProfile& p, double length, double omega, double f3) {
  const int n = 200000;
  const double h = length / n;
  cplx fine = 0.0;
  cplx coarse = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double z = i * h;
    const cplx v = isrs_gain(p, f3, z) * std::polar(1.0, omega * z);
    fine += ((i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0)) * v;
    if (i % 2 == 0) coarse += ((i == 0 || i == n) ? 1.0 : (i % 4 ? 4.0 : 2.0)) * v;
  }
  fine *= h / 3.0;
  coarse *= 2.0 * h / 3.0;
  return (16.0 * fine - coarse) / 15.0;
}

}  // namespace

TEST_CASE("closed form at zero phase is the effective length") {
  const double a = alpha_db_to_np(0.2);
  CHECK(std::abs(span_integral_closed_form(a, 100.0, 0.0) - cplx(effective_length(100.0, a), 0.0)) < 1e-12);
}

TEST_CASE("raman-free kernel equals the closed form to 1e-6") {
  const RamanProfile p = cl_profile(0.0);
  const SpanKernel k(p, 100.0, -5.02, 5.02);
  CHECK(k.raman_free());
  RandomSource rng(17);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double omega = std::pow(10.0, rng.uniform(-4.0, 4.0)) * (rng.uniform01() < 0.5 ? -1.0 : 1.0);
    const cplx ref = span_integral_closed_form(p.alpha_np_per_km(), 100.0, omega);
    worst = std::max(worst, std::abs(k.integrate(omega, rng.uniform(-5.0, 5.0)) - ref) / std::abs(ref));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("raman kernel matches brute-force distance integral") {
  const RamanProfile p = cl_profile(0.028);
  const SpanKernel k(p, 100.0, -5.02, 5.02);
  for (double omega : {0.0, 0.3, -2.0, 17.0, 250.0})
    for (double f3 : {-5.0, 0.0, 4.9}) {
      const cplx ref = brute_force(p, 100.0, omega, f3);
      INFO("omega " << omega << " f3 " << f3);
      CHECK(std::abs(k.integrate(omega, f3) - ref) / std::abs(ref) < 1e-6);
    }
}

TEST_CASE("shared weights reproduce integrate") {
  const RamanProfile p = cl_profile(0.028);
  const SpanKernel k(p, 80.0, -5.02, 5.02);
  std::vector<cplx> w;
  k.filon_weights(3.7, w);
  CHECK(std::abs(k.apply_weights(w, 1.2) - k.integrate(3.7, 1.2)) < 1e-15 * std::abs(k.integrate(3.7, 1.2)) + 1e-18);
}

TEST_CASE("averaged power is the oscillation average of |K|^2") {
  const RamanProfile p = cl_profile(0.0);
  const SpanKernel k(p, 100.0, -5.0, 5.0);
  const double omega = 40.0;
  // average of |K|^2 over one period of omega L
  const double period = 2.0 * kPi / 100.0;
  double avg = 0.0;
  const int n = 400;
  for (int i = 0; i < n; ++i) avg += std::norm(k.integrate(omega + period * (i + 0.5) / n, 0.0));
  avg /= n;
  CHECK(k.averaged_power(omega, 0.0) == doctest::Approx(avg).epsilon(2e-3));
}

TEST_CASE("span kernel is bounded by S L_eff") {
  FiberSpec fiber;
  const ChannelGrid g(5, 0.05, 32.0);
  const Link link = build_ptp_scenario(g, 2.0, {80.0, 100.0}, fiber);
  const double leff = effective_length(100.0, fiber.alpha_np_per_km());
  RandomSource rng(3);
  for (int i = 0; i < 200; ++i) {
    const double f = g.center(2) + rng.uniform(-0.015, 0.015);
    const double f1 = rng.uniform(-0.12, 0.12);
    const double f2 = rng.uniform(-0.12, 0.12);
    const double s = coupling_factor(g, link.span(1).load, f1, f2, f);
    // ISRS can lift a low frequency above e^{-alpha z}; allow the peak gain of the span.
    const double peak = std::exp(0.1);
    CHECK(std::abs(span_kernel(link, 1, f1, f2, f)) <= s * leff * peak + 1e-15);
  }
}

TEST_CASE("raman-free span kernel at f1 = f is S L_eff with the prior phase") {
  FiberSpec fiber;
  fiber.raman_slope_per_w_thz_km = 0.0;
  const ChannelGrid g(5, 0.05, 32.0);
  const Link link = build_ptp_scenario(g, 0.0, {80.0, 100.0}, fiber);
  const double psd = 1e-3 / 0.032;
  const cplx k0 = span_kernel(link, 0, 0.0, 0.05, 0.0);
  CHECK(std::abs(k0 - cplx(psd * effective_length(80.0, fiber.alpha_np_per_km()), 0.0)) < 1e-9 * std::abs(k0));

  const double f1 = 0.1;
  const double f2 = -0.05;
  const double f = 0.01;
  const auto d = dispersion_coeffs(fiber);
  const double omega = phase_rate(f1, f2, f, d);
  const cplx expect = psd * span_integral_closed_form(fiber.alpha_np_per_km(), 100.0, omega) *
                      std::polar(1.0, phase_mismatch(f1, f2, f, 80.0, d));
  CHECK(std::abs(span_kernel(link, 1, f1, f2, f) - expect) < 1e-6 * std::abs(expect));
}

TEST_CASE("quadrature rules integrate polynomials") {
  for (int n : {1, 3, 8, 16}) {
    const auto& r = gauss_legendre(n);
    double s = 0.0;
    double m = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      s += r.weights[i];
      m += r.weights[i] * std::pow(r.nodes[i], 2 * n - 2);
    }
    CHECK(s == doctest::Approx(2.0));
    CHECK(m == doctest::Approx(2.0 / (2 * n - 1)));
  }
  const auto& gk = gauss_kronrod15();
  double sk = 0.0;
  double sg = 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < gk.nodes.size(); ++i) {
    sk += gk.kronrod_weights[i];
    sg += gk.gauss_weights[i];
    m += gk.kronrod_weights[i] * std::pow(gk.nodes[i], 20);
  }
  CHECK(sk == doctest::Approx(2.0));
  CHECK(sg == doctest::Approx(2.0));
  CHECK(m == doctest::Approx(2.0 / 21.0));
}
