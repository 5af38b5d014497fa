#include "isrsgn/cli_app.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "isrsgn/errors.hpp"
#include "isrsgn/gn_engine.hpp"
#include "isrsgn/launch.hpp"
#include "isrsgn/modulation.hpp"
#include "isrsgn/parallel.hpp"
#include "isrsgn/raman.hpp"
#include "isrsgn/report.hpp"
#include "isrsgn/scenario_io.hpp"
#include "isrsgn/ssfm.hpp"

namespace isrsgn {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct JobOptions {
  std::string scenario_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::string spans_csv;
  std::optional<int> quad_nodes;
  std::optional<std::size_t> channels;
  bool desk_scale = false;
  std::optional<double> power_dbm;
  bool no_isrs = false;
  std::optional<double> rel_tol;
  std::optional<int> channel_points;
  std::string modulation = "gaussian";
  std::optional<std::size_t> symbols;
  std::optional<int> realizations;
  std::optional<int> steps_per_span;
  std::string gain = "isrs_compensating";
  double nf_db = 5.0;
  std::string sweep = "-3:0.5:3";
  std::optional<std::size_t> channel;
};

std::vector<double> parse_spans(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--spans: cannot parse '" + item + "' as a length in km");
    }
  }
  if (out.empty()) throw ConfigError("--spans: no span lengths given");
  return out;
}

std::vector<double> parse_sweep(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      parts.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("--sweep: expected lo:step:hi, got '" + spec + "'");
    }
  }
  if (parts.size() != 3 || !(parts[1] > 0.0) || parts[2] < parts[0])
    throw ConfigError("--sweep: expected lo:step:hi with step > 0 and hi >= lo");
  std::vector<double> grid;
  const auto n = static_cast<int>(std::floor((parts[2] - parts[0]) / parts[1] + 1e-9));
  for (int i = 0; i <= n; ++i) grid.push_back(parts[0] + parts[1] * i);
  return grid;
}

// Desk-scale defaults: five 10 GBd channels on a 12.5 GHz grid over 2 x 80 km.
void apply_desk_scale(Scenario& sc, SimulationSpec& sim) {
  sc.channel_count = 5;
  sc.spacing_thz = 0.0125;
  sc.symbol_rate_gbd = 10.0;
  sc.span_lengths_km = {80.0, 80.0};
  sc.plan.reset();
  sim.symbols = std::size_t{1} << 14;
  sim.realizations = 4;
  sim.samples_per_symbol = 16;
  sim.steps_per_span = 200;
}

struct Job {
  Scenario scenario;
  QuadratureSpec quad;
  SimulationSpec sim;
  ModulationSpec modulation;
};

Job make_job(const JobOptions& o) {
  Job job;
  if (!o.scenario_path.empty()) job.scenario = load_scenario(o.scenario_path);
  if (o.desk_scale) apply_desk_scale(job.scenario, job.sim);
  if (!o.spans_csv.empty()) {
    job.scenario.span_lengths_km = parse_spans(o.spans_csv);
    job.scenario.plan.reset();
  }
  if (o.channels) {
    job.scenario.channel_count = *o.channels;
    job.scenario.plan.reset();
  }
  if (o.seed) {
    job.scenario.load.seed = *o.seed;
    job.scenario.plan.reset();
    job.sim.seed = *o.seed;
  } else {
    job.sim.seed = job.scenario.load.seed;
  }
  if (o.power_dbm) job.scenario.load.power_dbm = *o.power_dbm;
  if (o.no_isrs) job.scenario.fiber.raman_slope_per_w_thz_km = 0.0;
  try {
    job.scenario.fiber.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  job.scenario.grid();
  for (double l : job.scenario.span_lengths_km)
    if (!(l > 0.0)) throw ConfigError("span lengths must be > 0");

  if (o.quad_nodes) job.quad.nodes_per_panel = *o.quad_nodes;
  if (o.rel_tol) job.quad.rel_tolerance = *o.rel_tol;
  if (o.channel_points) job.quad.channel_points = *o.channel_points;
  try {
    job.quad.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (o.symbols) job.sim.symbols = *o.symbols;
  if (o.realizations) job.sim.realizations = *o.realizations;
  if (o.steps_per_span) job.sim.steps_per_span = *o.steps_per_span;
  if (o.gain == "flat") {
    job.sim.gain = GainMode::flat;
  } else if (o.gain == "isrs_compensating") {
    job.sim.gain = GainMode::isrs_compensating;
  } else {
    throw ConfigError("--gain must be 'flat' or 'isrs_compensating'");
  }
  job.sim.validate();
  try {
    job.modulation.kind = modulation_from_string(o.modulation);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return job;
}

// Effective scenario with a materialized plan, for exact replay.
ordered_json effective_scenario(const Scenario& sc) {
  Scenario copy = sc;
  if (copy.load.mode == LoadMode::network && !copy.plan) copy.plan = copy.network_plan();
  return to_json(copy);
}

class Manifest {
 public:
  Manifest(const std::string& command, int argc, const char* const* argv) {
    j_["tool"] = "isrsgn";
    j_["command"] = command;
    std::vector<std::string> args(argv, argv + argc);
    if (!args.empty()) args.front() = fs::path(args.front()).filename().string();
    j_["argv"] = args;
    j_["versions"] = build_versions();
  }

  void configure(const Job& job, bool with_quad, bool with_sim) {
    ordered_json config;
    config["scenario"] = effective_scenario(job.scenario);
    if (with_quad) config["quadrature"] = to_json(job.quad);
    if (with_sim) {
      config["simulation"] = to_json(job.sim);
      config["modulation"] = {{"kind", to_string(job.modulation.kind)},
                              {"shaping_snr_db", job.modulation.shaping_snr_db}};
    }
    j_["seed"] = job.scenario.load.seed;
    j_["config_hash"] = "fnv1a64:" + hex64(fnv1a64(dump_stable(config)));
    j_["config"] = config;
  }

  ordered_json& summary() { return j_["summary"]; }
  void output(const fs::path& p) { j_["outputs"].push_back(p.filename().string()); }

  void write(const fs::path& out) const {
    fs::path path = out;
    path += ".run_manifest.json";
    write_text_file(path, dump_stable(j_));
  }

 private:
  ordered_json j_;
};

std::string csv_text(const std::vector<ReportRow>& rows, bool with_source) {
  std::ostringstream os;
  write_report_csv(os, rows, with_source);
  return os.str();
}

ordered_json tilt_summary(const Link& link) {
  ordered_json tilts = ordered_json::array();
  for (const Span& s : link.spans()) {
    const RamanProfile profile(link.grid(), s.load, s.fiber);
    tilts.push_back(profile.bands().size() >= 2 ? tilt_db(profile, s.length_km) : 0.0);
  }
  return tilts;
}

int cmd_gn_run(const JobOptions& o, int argc, const char* const* argv, std::ostream& out) {
  const Job job = make_job(o);
  const Link link = job.scenario.link();
  const NliReport report = snr_report(link, job.quad, job.scenario.signal_channels());
  const fs::path path(o.out_path);
  write_text_file(path, csv_text(rows_from(report), false));
  Manifest m("gn-run", argc, argv);
  m.configure(job, true, false);
  m.output(path);
  m.summary()["channels"] = report.entries.size();
  m.summary()["isrs_tilt_db"] = tilt_summary(link);
  m.write(path);
  out << "gn-run: " << report.entries.size() << " channels written to " << path.string() << "\n";
  return kExitOk;
}

int cmd_ssfm_run(const JobOptions& o, int argc, const char* const* argv, std::ostream& out) {
  const Job job = make_job(o);
  const SsfmReport report = run_ssfm(job.scenario, job.modulation, job.sim);
  const fs::path path(o.out_path);
  write_text_file(path, csv_text(rows_from(report), true));
  Manifest m("ssfm-run", argc, argv);
  m.configure(job, false, true);
  m.output(path);
  m.summary()["channels"] = report.entries.size();
  m.write(path);
  out << "ssfm-run: " << report.entries.size() << " channels written to " << path.string() << "\n";
  return kExitOk;
}

int cmd_compare(const JobOptions& o, int argc, const char* const* argv, std::ostream& out) {
  const Job job = make_job(o);
  const Link link = job.scenario.link();
  const NliReport model = snr_report(link, job.quad, job.scenario.signal_channels());
  const SsfmReport sim = run_ssfm(job.scenario, job.modulation, job.sim);
  std::vector<ReportRow> rows = rows_from(model);
  for (auto& r : rows_from(sim)) rows.push_back(r);
  const auto deviations = compare_reports(model, sim);
  const double mean = mean_abs_deviation_db(deviations);

  const fs::path path(o.out_path);
  fs::path dev_path = path;
  dev_path.replace_extension(".deviation.csv");
  write_text_file(path, csv_text(rows, true));
  std::ostringstream dev;
  write_deviation_csv(dev, deviations);
  write_text_file(dev_path, dev.str());

  Manifest m("compare", argc, argv);
  m.configure(job, true, true);
  m.output(path);
  m.output(dev_path);
  m.summary()["mean_abs_dev_db"] = mean;
  m.write(path);
  out << "compare: mean |model - ssfm| = " << mean << " dB over " << deviations.size() << " channels\n";
  return kExitOk;
}

int cmd_scenario_gen(const JobOptions& o, int argc, const char* const* argv, std::ostream& out) {
  Job job = make_job(o);
  if (job.scenario.load.mode == LoadMode::network && !job.scenario.plan)
    job.scenario.plan = job.scenario.network_plan();
  const fs::path path(o.out_path);
  write_text_file(path, dump_stable(to_json(job.scenario)));
  Manifest m("scenario-gen", argc, argv);
  m.configure(job, false, false);
  m.output(path);
  m.write(path);
  out << "scenario-gen: wrote " << path.string() << "\n";
  return kExitOk;
}

int cmd_launch_opt(const JobOptions& o, int argc, const char* const* argv, std::ostream& out) {
  const Job job = make_job(o);
  const std::vector<double> grid = parse_sweep(o.sweep);
  const std::size_t channel = o.channel.value_or(job.scenario.channel_count / 2);
  if (channel >= job.scenario.channel_count) throw ConfigError("--channel out of range");
  LaunchSweepOptions opts;
  opts.nf_db = o.nf_db;
  const auto sweep = launch_sweep(job.scenario, job.quad, channel, grid, opts);
  const double best = optimal_launch(sweep);
  const fs::path path(o.out_path);
  std::ostringstream os;
  write_launch_csv(os, sweep);
  write_text_file(path, os.str());
  Manifest m("launch-opt", argc, argv);
  m.configure(job, true, false);
  m.output(path);
  m.summary()["channel"] = channel;
  m.summary()["nf_db"] = o.nf_db;
  m.summary()["optimum_dbm"] = best;
  m.write(path);
  out << "launch-opt: optimum " << best << " dBm for channel " << channel << "\n";
  return kExitOk;
}

void add_common(CLI::App* cmd, JobOptions& o) {
  cmd->add_option("--scenario", o.scenario_path, "Scenario JSON file (default: built-in C+L point-to-point)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out_path, "Output file")->required();
  cmd->add_option("--seed", o.seed, "Seed for the load plan and the symbol streams");
  cmd->add_option("--spans", o.spans_csv, "Comma-separated span lengths in km");
  cmd->add_option("--quad-nodes", o.quad_nodes, "Gauss-Legendre nodes per panel (>= 8)");
  cmd->add_option("--channels", o.channels, "Channel count of the grid");
  cmd->add_flag("--desk-scale", o.desk_scale, "5 x 10 GBd over 2 x 80 km, 2^14 symbols x 4 realizations");
  cmd->add_option("--power-dbm", o.power_dbm, "Per-channel launch power");
  cmd->add_flag("--no-isrs", o.no_isrs, "Set the Raman gain slope to zero");
  cmd->add_option("--rel-tol", o.rel_tol, "Target relative error of G(f)");
  cmd->add_option("--channel-points", o.channel_points, "Quadrature points across a channel");
}

void add_simulation(CLI::App* cmd, JobOptions& o) {
  cmd->add_option("--modulation", o.modulation, "gaussian | uniform_64qam | mb_64qam");
  cmd->add_option("--symbols", o.symbols, "Symbols per channel and realization (power of two)");
  cmd->add_option("--realizations", o.realizations, "Independent realizations");
  cmd->add_option("--steps-per-span", o.steps_per_span, "Split-step steps per span");
  cmd->add_option("--gain", o.gain, "flat | isrs_compensating");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ISRS GN model NLI estimator with split-step reference"};
  app.require_subcommand(1);
  JobOptions o;

  auto* gn = app.add_subcommand("gn-run", "Per-channel NLI SNR from the model");
  add_common(gn, o);
  auto* ssfm = app.add_subcommand("ssfm-run", "Per-channel SNR from split-step simulation");
  add_common(ssfm, o);
  add_simulation(ssfm, o);
  auto* cmp = app.add_subcommand("compare", "Model and simulation side by side");
  add_common(cmp, o);
  add_simulation(cmp, o);
  auto* gen = app.add_subcommand("scenario-gen", "Write a replayable scenario with its load plan");
  add_common(gen, o);
  auto* launch = app.add_subcommand("launch-opt", "Launch power sweep with EDFA noise");
  add_common(launch, o);
  launch->add_option("--nf-db", o.nf_db, "Amplifier noise figure");
  launch->add_option("--sweep", o.sweep, "Power grid lo:step:hi in dBm");
  launch->add_option("--channel", o.channel, "Channel index (default: center)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (gn->parsed()) return cmd_gn_run(o, argc, argv, out);
    if (ssfm->parsed()) return cmd_ssfm_run(o, argc, argv, out);
    if (cmp->parsed()) return cmd_compare(o, argc, argv, out);
    if (gen->parsed()) return cmd_scenario_gen(o, argc, argv, out);
    if (launch->parsed()) return cmd_launch_opt(o, argc, argv, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const QuadratureError& e) {
    err << "quadrature error: " << e.what() << "\n";
    return kExitQuadrature;
  } catch (const AliasingError& e) {
    err << "aliasing error: " << e.what() << "\n";
    return kExitAliasing;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace isrsgn
