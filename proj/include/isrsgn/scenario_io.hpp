#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "isrsgn/scenario.hpp"

namespace isrsgn {

enum class LoadMode { full, network };

struct LoadConfig {
  LoadMode mode = LoadMode::full;
  std::uint64_t seed = 1;
  std::size_t stride = 5;
  double drop_fraction = 0.8;
  double utilization = 0.8;
  double power_dbm = 0.0;
};

/// Scenario file contents:
///   fiber{alpha_db_per_km, D, S, gamma, Cr[, ref_wavelength_nm]}
///   grid{count, spacing_thz, symbol_rate_gbd}
///   spans[lengths_km]
///   load{mode: "full"|"network", seed, stride, drop_fraction, utilization, power_dbm}
///   plan{...}   optional, a materialized NetworkLoadPlan for exact replay
struct Scenario {
  FiberSpec fiber;
  std::size_t channel_count = 251;
  double spacing_thz = 0.04;
  double symbol_rate_gbd = 40.0;
  std::vector<double> span_lengths_km = default_span_lengths_km();
  LoadConfig load;
  std::optional<NetworkLoadPlan> plan;

  ChannelGrid grid() const;
  /// The stored plan, or one generated from the load settings (network mode only).
  NetworkLoadPlan network_plan() const;
  /// Materializes the link at the configured launch power.
  Link link() const;
  Link link_at_power(double power_dbm) const;
  /// Channels to report: the plan's signal channels in network mode, every
  /// slot otherwise. A slot refilled by a different lightpath is not a signal.
  std::vector<std::size_t> signal_channels() const;
};

nlohmann::ordered_json to_json(const FiberSpec& fiber);
nlohmann::ordered_json to_json(const NetworkLoadPlan& plan);
nlohmann::ordered_json to_json(const Scenario& scenario);

/// All parse functions throw ConfigError on missing keys, wrong types or
/// physically invalid values.
FiberSpec fiber_from_json(const nlohmann::json& j);
NetworkLoadPlan plan_from_json(const nlohmann::json& j);
Scenario scenario_from_json(const nlohmann::json& j);

Scenario load_scenario(const std::filesystem::path& path);
/// Writes a stable, diffable serialization (same input, same bytes).
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
std::string dump_stable(const nlohmann::ordered_json& j);

}  // namespace isrsgn
