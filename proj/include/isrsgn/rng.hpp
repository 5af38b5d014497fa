#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace isrsgn {

/// Seeded random source whose output is bit-identical across platforms and
/// standard libraries.
///
/// The raw engine is std::mt19937_64 (fully specified by the C++ standard). The
/// distributions are implemented here instead of using <random> distributions,
/// whose algorithms are implementation-defined:
///   uniform01      top 53 bits of one draw scaled by 2^-53
///   uniform_index  rejection sampling on the full 64-bit range
///   normal         Box-Muller on two uniform01 draws
class RandomSource {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+u53+rejection+box-muller";

  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform01();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal deviate.
  double normal();

  /// Picks `count` distinct elements of `pool` uniformly at random (partial
  /// Fisher-Yates). Returned in selection order.
  std::vector<std::size_t> sample(std::vector<std::size_t> pool, std::size_t count);

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace isrsgn
