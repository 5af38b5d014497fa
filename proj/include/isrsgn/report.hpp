#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "isrsgn/gn_engine.hpp"
#include "isrsgn/launch.hpp"
#include "isrsgn/ssfm.hpp"

namespace isrsgn {

/// One CSV row. sigma2 of a simulated channel is P / SNR.
struct ReportRow {
  std::size_t channel_index;
  double f_thz;
  double power_w;
  double sigma2_nli_w;
  double snr_nli_db;
  std::string source;  // "model" or "ssfm"
};

std::vector<ReportRow> rows_from(const NliReport& report, const std::string& source = "model");
std::vector<ReportRow> rows_from(const SsfmReport& report);

/// channel_index,f_thz,power_dbm,sigma2_nli_dbm,snr_nli_db[,source]
void write_report_csv(std::ostream& os, const std::vector<ReportRow>& rows, bool with_source);

/// Per-channel model/simulation deviation (dB) of the channels present in both.
struct Deviation {
  std::size_t channel_index;
  double f_thz;
  double snr_model_db;
  double snr_ssfm_db;
  double deviation_db;  // model - ssfm
};

std::vector<Deviation> compare_reports(const NliReport& model, const SsfmReport& ssfm);
double mean_abs_deviation_db(const std::vector<Deviation>& deviations);

/// channel_index,f_thz,snr_model_db,snr_ssfm_db,deviation_db,mean_abs_dev_db
void write_deviation_csv(std::ostream& os, const std::vector<Deviation>& deviations);

/// power_dbm,sigma2_ase_dbm,sigma2_nli_dbm,snr_db
void write_launch_csv(std::ostream& os, const std::vector<LaunchPoint>& sweep);

/// 64-bit FNV-1a, stable across platforms.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

nlohmann::ordered_json to_json(const QuadratureSpec& quad);
nlohmann::ordered_json to_json(const SimulationSpec& sim);

/// Versions of the library and the third-party code it was built with.
nlohmann::ordered_json build_versions();

/// Writes text atomically enough for tests: truncates and writes in one go.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace isrsgn
