#include "isrsgn/report.hpp"

#include <fftw3.h>

#include <boost/version.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "isrsgn/rng.hpp"
#include "isrsgn/units.hpp"

namespace isrsgn {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::vector<ReportRow> rows_from(const NliReport& report, const std::string& source) {
  std::vector<ReportRow> rows;
  for (const auto& e : report.entries)
    rows.push_back({e.channel_index, e.f_thz, e.power_w, e.sigma2_nli_w, e.snr_nli_db, source});
  return rows;
}

std::vector<ReportRow> rows_from(const SsfmReport& report) {
  std::vector<ReportRow> rows;
  for (const auto& e : report.entries)
    rows.push_back({e.channel_index, e.f_thz, e.power_w, e.power_w / db_to_linear(e.snr_db), e.snr_db, "ssfm"});
  return rows;
}

void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows, bool with_source) {
  os << "channel_index,f_thz,power_dbm,sigma2_nli_dbm,snr_nli_db" << (with_source ? ",source" : "") << "\n";
  for (const auto& r : rows) {
    os << r.channel_index << "," << fmt("%.6f", r.f_thz) << "," << fmt("%.6f", watt_to_dbm(r.power_w)) << ","
       << fmt("%.6f", watt_to_dbm(r.sigma2_nli_w)) << "," << fmt("%.6f", r.snr_nli_db);
    if (with_source) os << "," << r.source;
    os << "\n";
  }
}

std::vector<Deviation> compare_reports(const NliReport& model, const SsfmReport& ssfm) {
  std::map<std::size_t, double> sim;
  for (const auto& e : ssfm.entries) sim[e.channel_index] = e.snr_db;
  std::vector<Deviation> out;
  for (const auto& e : model.entries) {
    const auto it = sim.find(e.channel_index);
    if (it == sim.end()) continue;
    out.push_back({e.channel_index, e.f_thz, e.snr_nli_db, it->second, e.snr_nli_db - it->second});
  }
  return out;
}

double mean_abs_deviation_db(const std::vector<Deviation>& deviations) {
  if (deviations.empty()) throw std::invalid_argument("compare: no common channels");
  double sum = 0.0;
  for (const auto& d : deviations) sum += std::abs(d.deviation_db);
  return sum / static_cast<double>(deviations.size());
}

void write_deviation_csv(std::ostream& os, const std::vector<Deviation>& deviations) {
  const double mean = mean_abs_deviation_db(deviations);
  os << "channel_index,f_thz,snr_model_db,snr_ssfm_db,deviation_db,mean_abs_dev_db\n";
  for (const auto& d : deviations) {
    os << d.channel_index << "," << fmt("%.6f", d.f_thz) << "," << fmt("%.6f", d.snr_model_db) << ","
       << fmt("%.6f", d.snr_ssfm_db) << "," << fmt("%.6f", d.deviation_db) << "," << fmt("%.6f", mean) << "\n";
  }
}

void write_launch_csv(std::ostream& os, const std::vector<LaunchPoint>& sweep) {
  auto dbm = [](double w) { return w > 0.0 ? fmt("%.6f", watt_to_dbm(w)) : std::string("-inf"); };
  os << "power_dbm,sigma2_ase_dbm,sigma2_nli_dbm,snr_db\n";
  for (const auto& p : sweep)
    os << fmt("%.3f", p.power_dbm) << "," << dbm(p.sigma2_ase_w) << "," << dbm(p.sigma2_nli_w) << ","
       << fmt("%.6f", p.snr_db) << "\n";
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

nlohmann::ordered_json to_json(const QuadratureSpec& q) {
  nlohmann::ordered_json j;
  j["scheme"] = q.scheme == QuadratureScheme::hyperbolic ? "hyperbolic" : "cartesian_oracle";
  j["nodes_per_panel"] = q.nodes_per_panel;
  j["max_panel_phase"] = q.max_panel_phase;
  j["max_panel_frequency_thz"] = q.max_panel_frequency_thz;
  j["theta_panel_width"] = q.theta_panel_width;
  j["rel_tolerance"] = q.rel_tolerance;
  j["max_theta_panels"] = q.max_theta_panels;
  j["coherent_periods"] = q.coherent_periods;
  j["span_kernel_tolerance"] = q.span_kernel_tolerance;
  j["channel_points"] = q.channel_points;
  j["cartesian_panels_per_channel"] = q.cartesian_panels_per_channel;
  if (q.band_lo_thz) j["band_lo_thz"] = *q.band_lo_thz;
  if (q.band_hi_thz) j["band_hi_thz"] = *q.band_hi_thz;
  return j;
}

nlohmann::ordered_json to_json(const SimulationSpec& sim) {
  nlohmann::ordered_json j;
  j["symbols"] = sim.symbols;
  j["realizations"] = sim.realizations;
  j["samples_per_symbol"] = sim.samples_per_symbol;
  j["steps_per_span"] = sim.steps_per_span;
  j["seed"] = sim.seed;
  j["rng_algorithm"] = std::string(RandomSource::kAlgorithm);
  j["gain"] = sim.gain == GainMode::flat ? "flat" : "isrs_compensating";
  return j;
}

nlohmann::ordered_json build_versions() {
  nlohmann::ordered_json j;
  j["isrsgn"] = ISRSGN_VERSION;
  j["fftw"] = std::string(fftw_version);
  j["boost"] = BOOST_LIB_VERSION;
  j["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                       "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  j["compiler"] = __VERSION__;
  return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace isrsgn
