#include "isrsgn/quadrature_rules.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <stdexcept>

#include "isrsgn/units.hpp"

namespace isrsgn {

namespace {

// Returns (P_n(x), P_n'(x)) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

GaussRule compute_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const auto slot = static_cast<std::size_t>(n - 1 - i);  // ascending order
    rule.nodes[slot] = x;
    rule.weights[slot] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 128) throw std::invalid_argument("gauss_legendre: n must be in [1, 128]");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

const KronrodRule& gauss_kronrod15() {
  static const KronrodRule rule = [] {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    // Boost stores the non-negative half of each symmetric rule, starting at 0.
    const auto& xk = gauss_kronrod<double, 15>::abscissa();
    const auto& wk = gauss_kronrod<double, 15>::weights();
    const auto& wg = gauss<double, 7>::weights();
    KronrodRule r;
    const std::size_t half = xk.size();  // 8
    for (std::size_t i = half; i-- > 1;) {
      r.nodes.push_back(-xk[i]);
      r.kronrod_weights.push_back(wk[i]);
      r.gauss_weights.push_back(i % 2 == 0 ? wg[i / 2] : 0.0);
    }
    for (std::size_t i = 0; i < half; ++i) {
      r.nodes.push_back(xk[i]);
      r.kronrod_weights.push_back(wk[i]);
      r.gauss_weights.push_back(i % 2 == 0 ? wg[i / 2] : 0.0);
    }
    return r;
  }();
  return rule;
}

}  // namespace isrsgn
