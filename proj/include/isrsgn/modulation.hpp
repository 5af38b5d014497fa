#pragma once

#include <complex>
#include <string>
#include <vector>

#include "isrsgn/rng.hpp"

namespace isrsgn {

enum class ModulationKind { gaussian, uniform_64qam, mb_64qam };

struct ModulationSpec {
  ModulationKind kind = ModulationKind::gaussian;
  double shaping_snr_db = 15.0;
};

ModulationKind modulation_from_string(const std::string& name);
std::string to_string(ModulationKind kind);

/// Discrete constellation normalized to unit average energy.
struct Constellation {
  std::vector<std::complex<double>> points;
  std::vector<double> probabilities;
  double nu = 0.0;  // Maxwell-Boltzmann parameter, exp(-nu |x|^2) before scaling

  double entropy_bits() const;
  double mean_energy() const;
};

/// 8x8 square QAM with probabilities exp(-nu |x|^2) / Z (nu = 0: uniform).
Constellation qam64(double nu);

/// Maxwell-Boltzmann 64-QAM for a target SNR. nu is found by bisection such that
/// the source entropy equals the AWGN capacity log2(1 + SNR) at that SNR.
Constellation mb_qam64(double shaping_snr_db);

/// Symbol source of one polarization tributary.
class SymbolSource {
 public:
  explicit SymbolSource(const ModulationSpec& spec);

  std::complex<double> draw(RandomSource& rng) const;
  const ModulationSpec& spec() const { return spec_; }
  /// Empty for Gaussian modulation.
  const Constellation& constellation() const { return constellation_; }

 private:
  ModulationSpec spec_;
  Constellation constellation_;
  std::vector<double> cdf_;
};

}  // namespace isrsgn
