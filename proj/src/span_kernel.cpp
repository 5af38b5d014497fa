#include "isrsgn/span_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "isrsgn/units.hpp"

namespace isrsgn {

namespace {

using cplx = std::complex<double>;

constexpr int kNodes = 8;  // degree-7 interpolation per panel

// Chebyshev points of the first kind on [-1, 1].
const std::array<double, kNodes>& interpolation_nodes() {
  static const std::array<double, kNodes> x = [] {
    std::array<double, kNodes> r{};
    for (int j = 0; j < kNodes; ++j) r[static_cast<std::size_t>(j)] = std::cos(kPi * (2 * j + 1) / (2.0 * kNodes));
    return r;
  }();
  return x;
}

// Inverse Vandermonde matrix: monomial coefficients = inv * nodal values.
const std::array<std::array<double, kNodes>, kNodes>& inverse_vandermonde() {
  static const auto inv = [] {
    const auto& x = interpolation_nodes();
    std::array<std::array<double, 2 * kNodes>, kNodes> a{};
    for (int i = 0; i < kNodes; ++i) {
      double p = 1.0;
      for (int k = 0; k < kNodes; ++k) {
        a[i][k] = p;  // row i: node i, column k: x_i^k
        p *= x[static_cast<std::size_t>(i)];
      }
      a[i][kNodes + i] = 1.0;
    }
    // Gauss-Jordan with partial pivoting.
    for (int c = 0; c < kNodes; ++c) {
      int piv = c;
      for (int r = c + 1; r < kNodes; ++r)
        if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
      std::swap(a[c], a[piv]);
      const double d = a[c][c];
      for (auto& v : a[c]) v /= d;
      for (int r = 0; r < kNodes; ++r) {
        if (r == c) continue;
        const double m = a[r][c];
        for (int k = 0; k < 2 * kNodes; ++k) a[r][k] -= m * a[c][k];
      }
    }
    // a now holds [I | V^-1] with V[i][k] = x_i^k; coefficients c = V^-1 q.
    std::array<std::array<double, kNodes>, kNodes> out{};
    for (int i = 0; i < kNodes; ++i)
      for (int k = 0; k < kNodes; ++k) out[i][k] = a[i][kNodes + k];
    return out;
  }();
  return inv;
}

// mu_k = integral_{-1}^{1} x^k exp(lambda x) dx for k < kNodes.
std::array<cplx, kNodes> exponential_moments(cplx lambda) {
  std::array<cplx, kNodes> mu{};
  const cplx ep = std::exp(lambda);
  const cplx em = 1.0 / ep;
  if (std::abs(lambda) > static_cast<double>(kNodes)) {
    mu[0] = (ep - em) / lambda;
    for (int k = 1; k < kNodes; ++k) {
      const cplx boundary = (k % 2 == 0) ? ep - em : ep + em;
      mu[k] = (boundary - static_cast<double>(k) * mu[k - 1]) / lambda;
    }
    return mu;
  }
  // Series for the highest moment, then the stable backward recurrence.
  constexpr int top = kNodes - 1;
  cplx term = 1.0;  // lambda^n / n!
  cplx sum = 0.0;
  for (int n = 0; n < 200; ++n) {
    if ((top + n) % 2 == 0) {
      const cplx add = term * (2.0 / (top + n + 1));
      sum += add;
      if (n > 4 && std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    term *= lambda / static_cast<double>(n + 1);
  }
  mu[top] = sum;
  for (int k = top; k >= 1; --k) {
    const cplx boundary = (k % 2 == 0) ? ep - em : ep + em;
    mu[k - 1] = (boundary - lambda * mu[k]) / static_cast<double>(k);
  }
  return mu;
}

}  // namespace

cplx span_integral_closed_form(double alpha, double length_km, double omega) {
  const cplx c(-alpha, omega);
  // (exp(c L) - 1) / c, written with expm1 for the small-|c L| regime
  const cplx cl = c * length_km;
  if (std::abs(cl) < 1e-3) return length_km * (1.0 + cl / 2.0 + cl * cl / 6.0 + cl * cl * cl / 24.0);
  return (std::exp(cl) - 1.0) / c;
}

SpanKernel::SpanKernel(RamanProfile profile, double length_km, double f_lo_thz, double f_hi_thz,
                       double rel_tolerance)
    : profile_(std::move(profile)),
      length_(length_km),
      alpha_(profile_.alpha_np_per_km()),
      raman_free_(profile_.raman_slope() == 0.0 || profile_.total_power_w() <= 0.0) {
  if (!(length_km > 0.0)) throw std::invalid_argument("span kernel: length must be > 0");
  if (!(rel_tolerance > 0.0)) throw std::invalid_argument("span kernel: tolerance must be > 0");

  if (!raman_free_) {
    const double p = profile_.total_power_w();
    end_exponent_ = profile_.raman_exponent(length_);
    end_log_weight_ = std::log(p / profile_.normalization(end_exponent_));
    start_slope_ = p * profile_.raman_slope();
    end_slope_ = start_slope_ * std::exp(-alpha_ * length_);
    start_mean_ = profile_.mean_frequency(0.0);
    end_mean_ = profile_.mean_frequency(end_exponent_);
  }

  if (raman_free_) {
    build_panels(1);
    return;
  }
  // Probes at the band edges, without oscillation and at phase rates around
  // the attenuation where the kernel is smallest relative to its integrand.
  const std::array<double, 4> omegas{0.0, alpha_, 4.0 * alpha_, 16.0 * alpha_};
  auto probe = [&] {
    std::vector<cplx> v;
    for (double om : omegas) {
      v.push_back(integrate(om, f_lo_thz));
      v.push_back(integrate(om, f_hi_thz));
    }
    return v;
  };
  std::size_t count = 1;
  build_panels(count);
  for (; count <= 256; count *= 2) {
    const auto coarse = probe();
    build_panels(2 * count);
    const auto fine = probe();
    double err = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) err = std::max(err, std::abs(fine[i] - coarse[i]) / std::abs(fine[i]));
    if (err < rel_tolerance) {
      // the finer rule is far more accurate, so err bounds the coarse one
      build_panels(count);
      return;
    }
  }
  throw std::runtime_error("span kernel: panel refinement did not reach the tolerance");
}

void SpanKernel::build_panels(std::size_t count) {
  panel_mid_.assign(count, 0.0);
  panel_half_.assign(count, 0.0);
  node_exponent_.assign(count * kNodes, 0.0);
  node_log_weight_.assign(count * kNodes, 0.0);
  // Boundaries at equal increments of the effective length.
  const double span_fraction = -std::expm1(-alpha_ * length_);
  auto boundary = [&](std::size_t p) {
    if (p == count) return length_;
    return -std::log1p(-span_fraction * static_cast<double>(p) / static_cast<double>(count)) / alpha_;
  };
  const auto& x = interpolation_nodes();
  for (std::size_t p = 0; p < count; ++p) {
    const double a = boundary(p);
    const double b = boundary(p + 1);
    panel_mid_[p] = 0.5 * (a + b);
    panel_half_[p] = 0.5 * (b - a);
    for (int j = 0; j < kNodes; ++j) {
      const double z = panel_mid_[p] + panel_half_[p] * x[static_cast<std::size_t>(j)];
      const std::size_t n = p * kNodes + static_cast<std::size_t>(j);
      if (raman_free_) continue;
      const double t = profile_.raman_exponent(z);
      node_exponent_[n] = t;
      node_log_weight_[n] = std::log(profile_.total_power_w() / profile_.normalization(t));
    }
  }
}

void SpanKernel::filon_weights(double omega, std::vector<cplx>& w) const {
  const cplx c(-alpha_, omega);
  const auto& inv = inverse_vandermonde();
  w.assign(panel_mid_.size() * kNodes, 0.0);
  for (std::size_t p = 0; p < panel_mid_.size(); ++p) {
    const double h = panel_half_[p];
    const auto mu = exponential_moments(c * h);
    const cplx scale = h * std::exp(c * panel_mid_[p]);
    for (int j = 0; j < kNodes; ++j) {
      cplx acc = 0.0;
      for (int k = 0; k < kNodes; ++k) acc += inv[k][j] * mu[static_cast<std::size_t>(k)];
      w[p * kNodes + static_cast<std::size_t>(j)] = scale * acc;
    }
  }
}

cplx SpanKernel::apply_weights(const std::vector<cplx>& w, double f3) const {
  if (w.size() != node_exponent_.size()) throw std::invalid_argument("span kernel: weight count mismatch");
  cplx total = 0.0;
  if (raman_free_) {
    for (const cplx& v : w) total += v;
    return total;
  }
  for (std::size_t n = 0; n < w.size(); ++n) total += w[n] * std::exp(node_log_weight_[n] - node_exponent_[n] * f3);
  return total;
}

cplx SpanKernel::integrate(double omega, double f3_thz) const {
  std::vector<cplx> w;
  filon_weights(omega, w);
  return apply_weights(w, f3_thz);
}

void SpanKernel::refine_to(std::size_t count) {
  if (count > panel_mid_.size()) build_panels(count);
}

double SpanKernel::averaged_power(double omega, double f3_thz) const {
  const double w2 = omega * omega;
  if (raman_free_) {
    const double end = std::exp(-2.0 * alpha_ * length_);
    return (1.0 + end) / (alpha_ * alpha_ + w2);
  }
  const double a0 = alpha_ + start_slope_ * (f3_thz - start_mean_);
  const double a1 = alpha_ + end_slope_ * (f3_thz - end_mean_);
  const double rho_end = std::exp(-alpha_ * length_ + end_log_weight_ - end_exponent_ * f3_thz);
  return 1.0 / (a0 * a0 + w2) + rho_end * rho_end / (a1 * a1 + w2);
}

}  // namespace isrsgn
