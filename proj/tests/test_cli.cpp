#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "isrsgn/cli_app.hpp"

using namespace isrsgn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "isrsgn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "isrsgn_test_cli";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("gn-run on the full C+L grid writes 251 rows and a manifest") {
  const fs::path out = scratch() / "full.csv";
  const Run r = run({"gn-run", "--out", out.string(), "--spans", "100", "--channel-points", "1", "--rel-tol",
                     "1e-2"});
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(out));
  REQUIRE(rows.size() == 252);
  CHECK(rows[0] == "channel_index,f_thz,power_dbm,sigma2_nli_dbm,snr_nli_db");
  CHECK(rows[1].rfind("0,", 0) == 0);
  CHECK(rows[251].rfind("250,", 0) == 0);

  const auto manifest = nlohmann::json::parse(slurp(fs::path(out.string() + ".run_manifest.json")));
  CHECK(manifest["command"] == "gn-run");
  CHECK(manifest.contains("config_hash"));
  CHECK(manifest.contains("seed"));
  CHECK(manifest["versions"].contains("isrsgn"));
  CHECK(manifest["config"]["scenario"]["grid"]["count"] == 251);
  CHECK(manifest["summary"]["isrs_tilt_db"][0].get<double>() == doctest::Approx(6.5).epsilon(0.05));
}

TEST_CASE("manifest is reproducible") {
  const fs::path a = scratch() / "a.csv";
  const fs::path b = scratch() / "b.csv";
  REQUIRE(run({"gn-run", "--desk-scale", "--out", a.string()}).code == 0);
  REQUIRE(run({"gn-run", "--desk-scale", "--out", b.string()}).code == 0);
  CHECK(slurp(a) == slurp(b));
  auto ma = nlohmann::json::parse(slurp(fs::path(a.string() + ".run_manifest.json")));
  auto mb = nlohmann::json::parse(slurp(fs::path(b.string() + ".run_manifest.json")));
  CHECK(ma["config_hash"] == mb["config_hash"]);
  ma.erase("argv");
  mb.erase("argv");
  ma.erase("outputs");
  mb.erase("outputs");
  CHECK(ma == mb);
}

TEST_CASE("scenario-gen is byte-identical for the same seed and replayable") {
  const fs::path base = scratch() / "base.json";
  {
    std::ofstream f(base);
    f << R"({"fiber":{"alpha_db_per_km":0.2,"D":17,"S":0.067,"gamma":1.2,"Cr":0.028},
             "grid":{"count":251,"spacing_thz":0.04,"symbol_rate_gbd":40},
             "spans":[100,100,100],
             "load":{"mode":"network","seed":1,"stride":5,"drop_fraction":0.8,"utilization":0.8,"power_dbm":0}})";
  }
  const fs::path p1 = scratch() / "plan1.json";
  const fs::path p2 = scratch() / "plan2.json";
  const fs::path p3 = scratch() / "plan3.json";
  REQUIRE(run({"scenario-gen", "--scenario", base.string(), "--seed", "9", "--out", p1.string()}).code == 0);
  REQUIRE(run({"scenario-gen", "--scenario", base.string(), "--seed", "9", "--out", p2.string()}).code == 0);
  REQUIRE(run({"scenario-gen", "--scenario", base.string(), "--seed", "10", "--out", p3.string()}).code == 0);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(slurp(p1) != slurp(p3));
  const auto plan = nlohmann::json::parse(slurp(p1));
  CHECK(plan.contains("plan"));
  // replaying the generated file reproduces itself
  const fs::path p4 = scratch() / "plan4.json";
  REQUIRE(run({"scenario-gen", "--scenario", p1.string(), "--out", p4.string()}).code == 0);
  CHECK(slurp(p1) == slurp(p4));
}

TEST_CASE("compare at reduced size writes the deviation table") {
  const fs::path out = scratch() / "cmp.csv";
  const Run r = run({"compare", "--desk-scale", "--spans", "80", "--symbols", "2048", "--realizations", "1",
                     "--steps-per-span", "100", "--out", out.string()});
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(out));
  REQUIRE(rows.size() == 11);
  CHECK(rows[0] == "channel_index,f_thz,power_dbm,sigma2_nli_dbm,snr_nli_db,source");
  CHECK(rows[1].find(",model") != std::string::npos);
  CHECK(rows[10].find(",ssfm") != std::string::npos);
  const auto dev = lines(slurp(scratch() / "cmp.deviation.csv"));
  REQUIRE(dev.size() == 6);
  CHECK(dev[0].find("mean_abs_dev_db") != std::string::npos);
  const auto manifest = nlohmann::json::parse(slurp(fs::path(out.string() + ".run_manifest.json")));
  CHECK(manifest["summary"]["mean_abs_dev_db"].get<double>() < 0.8);
}

TEST_CASE("launch-opt writes the sweep") {
  const fs::path out = scratch() / "launch.csv";
  const Run r = run({"launch-opt", "--desk-scale", "--sweep", "-2:1:2", "--channel-points", "1", "--out",
                     out.string()});
  REQUIRE(r.code == 0);
  const auto rows = lines(slurp(out));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "power_dbm,sigma2_ase_dbm,sigma2_nli_dbm,snr_db");
  CHECK(r.out.find("optimum") != std::string::npos);
}

TEST_CASE("exit codes") {
  const fs::path out = scratch() / "x.csv";
  CHECK(run({"gn-run"}).code == kExitConfig);  // --out missing
  CHECK(run({"nonsense", "--out", out.string()}).code == kExitConfig);
  CHECK(run({"gn-run", "--out", out.string(), "--spans", "80,abc"}).code == kExitConfig);
  CHECK(run({"gn-run", "--out", out.string(), "--spans", "80,-3"}).code == kExitConfig);
  CHECK(run({"gn-run", "--out", out.string(), "--quad-nodes", "2"}).code == kExitConfig);
  CHECK(run({"gn-run", "--out", out.string(), "--scenario", "/nonexistent/file.json"}).code == kExitConfig);

  const fs::path bad = scratch() / "bad.json";
  {
    std::ofstream f(bad);
    f << "{ not json";
  }
  CHECK(run({"gn-run", "--out", out.string(), "--scenario", bad.string()}).code == kExitConfig);

  // 41 channels do not fit the sampled band of 16 samples per symbol
  const Run alias = run({"ssfm-run", "--desk-scale", "--symbols", "256", "--out", out.string(), "--steps-per-span",
                         "2", "--realizations", "1", "--channels", "41"});
  CHECK(alias.code == kExitAliasing);

  const Run quad = run({"gn-run", "--desk-scale", "--rel-tol", "1e-14", "--out", out.string()});
  CHECK(quad.code == kExitQuadrature);
}
