#include "isrsgn/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "isrsgn/errors.hpp"

namespace isrsgn {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <typename T>
T required(const json& j, const char* key, const char* section) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(std::string("scenario: missing key '") + section + "." + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: bad value for '") + section + "." + key + "': " + e.what());
  }
}

template <typename T>
T optional_value(const json& j, const char* key, T fallback, const char* section) {
  if (!j.contains(key)) return fallback;
  return required<T>(j, key, section);
}

}  // namespace

ChannelGrid Scenario::grid() const {
  try {
    return ChannelGrid(channel_count, spacing_thz, symbol_rate_gbd);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

NetworkLoadPlan Scenario::network_plan() const {
  if (load.mode != LoadMode::network) throw ConfigError("scenario: load mode is not 'network'");
  if (plan) {
    if (plan->channel_count != channel_count || plan->span_count() != span_lengths_km.size())
      throw ConfigError("scenario: stored plan does not match grid/spans");
    return *plan;
  }
  try {
    return build_network_plan(grid(), load.stride, load.drop_fraction, load.utilization, load.seed,
                              span_lengths_km.size());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Link Scenario::link() const { return link_at_power(load.power_dbm); }

std::vector<std::size_t> Scenario::signal_channels() const {
  if (load.mode == LoadMode::network) return network_plan().signal_channels;
  std::vector<std::size_t> all(channel_count);
  for (std::size_t i = 0; i < channel_count; ++i) all[i] = i;
  return all;
}

Link Scenario::link_at_power(double power_dbm) const {
  try {
    if (load.mode == LoadMode::full) return build_ptp_scenario(grid(), power_dbm, span_lengths_km, fiber);
    return build_network_link(grid(), network_plan(), power_dbm, span_lengths_km, fiber);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ordered_json to_json(const FiberSpec& fiber) {
  ordered_json j;
  j["alpha_db_per_km"] = fiber.alpha_db_per_km;
  j["D"] = fiber.dispersion_ps_nm_km;
  j["S"] = fiber.slope_ps_nm2_km;
  j["gamma"] = fiber.gamma_per_w_km;
  j["Cr"] = fiber.raman_slope_per_w_thz_km;
  j["ref_wavelength_nm"] = fiber.ref_wavelength_nm;
  return j;
}

ordered_json to_json(const NetworkLoadPlan& plan) {
  ordered_json j;
  j["rng_algorithm"] = plan.rng_algorithm;
  j["seed"] = plan.seed;
  j["channel_count"] = plan.channel_count;
  j["signal_stride"] = plan.signal_stride;
  j["drop_fraction"] = plan.drop_fraction;
  j["utilization"] = plan.utilization;
  j["target_occupied"] = plan.target_occupied;
  j["signal_channels"] = plan.signal_channels;
  ordered_json spans = ordered_json::array();
  for (const auto& st : plan.spans) {
    ordered_json s;
    s["lightpath"] = st.lightpath;
    s["power_offset_db"] = st.power_offset_db;
    s["predispersion_km"] = st.predispersion_km;
    spans.push_back(std::move(s));
  }
  j["spans"] = std::move(spans);
  return j;
}

ordered_json to_json(const Scenario& sc) {
  ordered_json j;
  j["fiber"] = to_json(sc.fiber);
  j["grid"] = {{"count", sc.channel_count},
               {"spacing_thz", sc.spacing_thz},
               {"symbol_rate_gbd", sc.symbol_rate_gbd}};
  j["spans"] = sc.span_lengths_km;
  ordered_json load;
  load["mode"] = sc.load.mode == LoadMode::full ? "full" : "network";
  load["seed"] = sc.load.seed;
  load["stride"] = sc.load.stride;
  load["drop_fraction"] = sc.load.drop_fraction;
  load["utilization"] = sc.load.utilization;
  load["power_dbm"] = sc.load.power_dbm;
  j["load"] = std::move(load);
  if (sc.plan) j["plan"] = to_json(*sc.plan);
  return j;
}

FiberSpec fiber_from_json(const json& j) {
  FiberSpec f;
  f.alpha_db_per_km = required<double>(j, "alpha_db_per_km", "fiber");
  f.dispersion_ps_nm_km = required<double>(j, "D", "fiber");
  f.slope_ps_nm2_km = required<double>(j, "S", "fiber");
  f.gamma_per_w_km = required<double>(j, "gamma", "fiber");
  f.raman_slope_per_w_thz_km = required<double>(j, "Cr", "fiber");
  f.ref_wavelength_nm = optional_value<double>(j, "ref_wavelength_nm", 1550.0, "fiber");
  try {
    f.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return f;
}

NetworkLoadPlan plan_from_json(const json& j) {
  NetworkLoadPlan p;
  p.rng_algorithm = required<std::string>(j, "rng_algorithm", "plan");
  p.seed = required<std::uint64_t>(j, "seed", "plan");
  p.channel_count = required<std::size_t>(j, "channel_count", "plan");
  p.signal_stride = required<std::size_t>(j, "signal_stride", "plan");
  p.drop_fraction = required<double>(j, "drop_fraction", "plan");
  p.utilization = required<double>(j, "utilization", "plan");
  p.target_occupied = required<std::size_t>(j, "target_occupied", "plan");
  p.signal_channels = required<std::vector<std::size_t>>(j, "signal_channels", "plan");
  const json spans = required<json>(j, "spans", "plan");
  if (!spans.is_array() || spans.empty()) throw ConfigError("scenario: plan.spans must be a non-empty array");
  for (const json& s : spans) {
    NetworkLoadPlan::SpanState st;
    st.lightpath = required<std::vector<std::uint32_t>>(s, "lightpath", "plan.spans");
    st.power_offset_db = required<std::vector<double>>(s, "power_offset_db", "plan.spans");
    st.predispersion_km = required<std::vector<double>>(s, "predispersion_km", "plan.spans");
    if (st.lightpath.size() != p.channel_count || st.power_offset_db.size() != p.channel_count ||
        st.predispersion_km.size() != p.channel_count)
      throw ConfigError("scenario: plan span arrays must have channel_count entries");
    p.spans.push_back(std::move(st));
  }
  return p;
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario: top level must be an object");
  Scenario sc;
  sc.fiber = fiber_from_json(required<json>(j, "fiber", "root"));
  const json grid = required<json>(j, "grid", "root");
  sc.channel_count = required<std::size_t>(grid, "count", "grid");
  sc.spacing_thz = required<double>(grid, "spacing_thz", "grid");
  sc.symbol_rate_gbd = required<double>(grid, "symbol_rate_gbd", "grid");
  sc.span_lengths_km = required<std::vector<double>>(j, "spans", "root");
  if (sc.span_lengths_km.empty()) throw ConfigError("scenario: spans must not be empty");
  for (double l : sc.span_lengths_km)
    if (!(l > 0.0)) throw ConfigError("scenario: span lengths must be > 0");

  const json load = required<json>(j, "load", "root");
  const auto mode = required<std::string>(load, "mode", "load");
  if (mode == "full") {
    sc.load.mode = LoadMode::full;
  } else if (mode == "network") {
    sc.load.mode = LoadMode::network;
  } else {
    throw ConfigError("scenario: load.mode must be 'full' or 'network'");
  }
  sc.load.power_dbm = required<double>(load, "power_dbm", "load");
  sc.load.seed = optional_value<std::uint64_t>(load, "seed", sc.load.seed, "load");
  sc.load.stride = optional_value<std::size_t>(load, "stride", sc.load.stride, "load");
  sc.load.drop_fraction = optional_value<double>(load, "drop_fraction", sc.load.drop_fraction, "load");
  sc.load.utilization = optional_value<double>(load, "utilization", sc.load.utilization, "load");
  if (j.contains("plan")) sc.plan = plan_from_json(j.at("plan"));
  sc.grid();  // validates
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario: JSON parse error in " + path.string() + ": " + e.what());
  }
  return scenario_from_json(j);
}

std::string dump_stable(const ordered_json& j) { return j.dump(2) + "\n"; }

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write scenario file: " + path.string());
  out << dump_stable(to_json(scenario));
}

}  // namespace isrsgn
