#include "isrsgn/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isrsgn/units.hpp"

namespace isrsgn {

ModulationKind modulation_from_string(const std::string& name) {
  if (name == "gaussian") return ModulationKind::gaussian;
  if (name == "uniform_64qam") return ModulationKind::uniform_64qam;
  if (name == "mb_64qam") return ModulationKind::mb_64qam;
  throw std::invalid_argument("unknown modulation '" + name + "'");
}

std::string to_string(ModulationKind kind) {
  switch (kind) {
    case ModulationKind::gaussian: return "gaussian";
    case ModulationKind::uniform_64qam: return "uniform_64qam";
    case ModulationKind::mb_64qam: return "mb_64qam";
  }
  return "unknown";
}

double Constellation::entropy_bits() const {
  double h = 0.0;
  for (double p : probabilities)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

double Constellation::mean_energy() const {
  double e = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) e += probabilities[i] * std::norm(points[i]);
  return e;
}

Constellation qam64(double nu) {
  if (nu < 0.0) throw std::invalid_argument("qam64: nu must be >= 0");
  Constellation c;
  c.nu = nu;
  double z = 0.0;
  for (int i = 0; i < 8; ++i) {
    for (int q = 0; q < 8; ++q) {
      const std::complex<double> x(2.0 * i - 7.0, 2.0 * q - 7.0);
      c.points.push_back(x);
      c.probabilities.push_back(std::exp(-nu * std::norm(x)));
      z += c.probabilities.back();
    }
  }
  for (double& p : c.probabilities) p /= z;
  const double scale = 1.0 / std::sqrt(c.mean_energy());
  for (auto& x : c.points) x *= scale;
  return c;
}

Constellation mb_qam64(double shaping_snr_db) {
  const double target = std::log2(1.0 + db_to_linear(shaping_snr_db));
  if (!(target > 0.0) || target >= 6.0)
    throw std::invalid_argument("mb_qam64: shaping SNR gives no valid entropy target in (0, 6) bit");
  // Entropy falls monotonically from 6 bit (nu = 0) towards 2 bit as nu grows.
  double lo = 0.0;
  double hi = 1.0;
  while (qam64(hi).entropy_bits() > target) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (qam64(mid).entropy_bits() > target ? lo : hi) = mid;
  }
  return qam64(0.5 * (lo + hi));
}

SymbolSource::SymbolSource(const ModulationSpec& spec) : spec_(spec) {
  if (spec.kind == ModulationKind::gaussian) return;
  constellation_ = spec.kind == ModulationKind::uniform_64qam ? qam64(0.0) : mb_qam64(spec.shaping_snr_db);
  double acc = 0.0;
  for (double p : constellation_.probabilities) cdf_.push_back(acc += p);
  cdf_.back() = 1.0;
}

std::complex<double> SymbolSource::draw(RandomSource& rng) const {
  if (spec_.kind == ModulationKind::gaussian) {
    const double re = rng.normal();
    const double im = rng.normal();
    return {re * std::sqrt(0.5), im * std::sqrt(0.5)};
  }
  const double u = rng.uniform01();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), cdf_.size() - 1));
  return constellation_.points[i];
}

}  // namespace isrsgn
