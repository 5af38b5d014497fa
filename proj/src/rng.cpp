#include "isrsgn/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "isrsgn/units.hpp"

namespace isrsgn {

double RandomSource::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::uint64_t RandomSource::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % n + 1) % n;  // largest multiple of n, minus one
  std::uint64_t x = next_u64();
  while (x > limit) x = next_u64();
  return x % n;
}

double RandomSource::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_normal_ = r * std::sin(2.0 * kPi * u2);
  has_spare_normal_ = true;
  return r * std::cos(2.0 * kPi * u2);
}

std::vector<std::size_t> RandomSource::sample(std::vector<std::size_t> pool, std::size_t count) {
  if (count > pool.size()) throw std::invalid_argument("sample: count exceeds pool size");
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace isrsgn
