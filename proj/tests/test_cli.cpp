#include "doctest.h"

#include "hofer/cli.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace hofer;
using namespace hofer::cli;

namespace {

constexpr double kPi = std::numbers::pi;

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("hofer_cli_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config text") {
  RunConfig cfg;
  std::istringstream in("# comment\nsuite = energy\n\nseed=42   # trailing\nradii = 0.1, 0.2\nplots = false\n");
  parse_config(in, cfg);
  CHECK(cfg.suite == "energy");
  CHECK(cfg.seed == 42);
  CHECK(cfg.radii == std::vector<double>{0.1, 0.2});
  CHECK_FALSE(cfg.plots);

  // every key round-trips through its text form
  RunConfig back;
  std::istringstream again(to_config_text(cfg));
  parse_config(again, back);
  CHECK(to_config_text(back) == to_config_text(cfg));
  for (const char* key : {"n", "eps", "phi", "families", "suite", "seed", "grid", "s_min", "tol_stokes", "out", "jobs"})
    CHECK(std::find(config_keys().begin(), config_keys().end(), key) != config_keys().end());
}

TEST_CASE("config errors carry key and line") {
  RunConfig cfg;
  std::istringstream unknown("seed = 1\ncolour = red\n");
  try {
    parse_config(unknown, cfg);
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "colour");
    CHECK(e.line() == 2);
  }
  std::istringstream no_eq("suite energy\n");
  CHECK_THROWS_AS(parse_config(no_eq, cfg), ConfigError);
  CHECK_THROWS_AS(set_key(cfg, "seed", "-3"), ConfigError);
  CHECK_THROWS_AS(set_key(cfg, "tol_stokes", "abc"), ConfigError);
  CHECK_THROWS_AS(set_key(cfg, "tol_stokes", "inf"), ConfigError);
  CHECK_THROWS_AS(set_key(cfg, "plots", "maybe"), ConfigError);

  for (const char* key : {"tol_energy", "tol_omega", "tol_action", "tol_bathtub", "tol_dominance", "tol_monotonicity",
                          "tol_exponent", "tol_ratio", "tol_decay", "tol_structure", "tol_density", "tol_stokes"}) {
    RunConfig c;
    set_key(c, key, "0");
    CHECK_THROWS_AS(validate(c), ConfigError);
    set_key(c, key, "-1e-3");
    CHECK_THROWS_AS(validate(c), ConfigError);
  }
  RunConfig c;
  c.suite = "everything";
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = RunConfig{};
  c.families = {"extremal", "spirals"};
  CHECK_THROWS_AS(validate(c), ConfigError);
  c = RunConfig{};
  c.n = 3;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.families = {"none"};
  CHECK_NOTHROW(validate(c));
  CHECK_NOTHROW(validate(RunConfig{}));
}

TEST_CASE("error report document") {
  const auto doc = nlohmann::json::parse(error_report("config", "bad", "seed", 3));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["status"] == "error");
  CHECK(doc["errors"][0]["key"] == "seed");
  CHECK(doc["errors"][0]["line"] == 3);
}

TEST_CASE("monotonicity suite on the extremal family") {
  RunConfig cfg;
  cfg.suite = "monotonicity";
  cfg.families = {"extremal"};
  cfg.kmax = 5;
  cfg.out = scratch("mono").string();
  const RunResult r = run(cfg);
  CHECK(r.exit_code == 0);
  CHECK(r.status == "pass");
  std::istringstream csv(slurp(std::filesystem::path(cfg.out) / "monotonicity.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "curve,k,r,area,area_error,ratio");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    const double ratio = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(std::abs(ratio - kPi) <= 1e-6);
  }
  CHECK(rows == 5);
  CHECK(std::filesystem::exists(std::filesystem::path(cfg.out) / "hbar.svg"));
}

TEST_CASE("acs suite report") {
  RunConfig cfg;
  cfg.suite = "acs";
  cfg.phi = "quadratic";
  cfg.kmax = 2;
  cfg.out = scratch("acs").string();
  const RunResult r = run(cfg);
  CHECK(r.exit_code == 0);
  const auto doc = nlohmann::json::parse(slurp(std::filesystem::path(cfg.out) / "report.json"));
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["status"] == "pass");
  bool saw_decay = false;
  int actions = 0;
  for (const auto& c : doc["checks"]) {
    // every number is reported with an error
    for (const auto& [name, q] : c["values"].items()) {
      CHECK(q.contains("value"));
      CHECK(q.contains("error"));
    }
    if (c["check"] == "acc1_decay") {
      saw_decay = true;
      CHECK(std::abs(c["values"]["delta"]["value"].get<double>() - 1.0) < 0.1);
    }
    if (c["check"] == "orbit_action") {
      ++actions;
      CHECK(std::abs(c["values"]["mismatch_factor"]["value"].get<double>() - 2.0) < 1e-6);
      CHECK(c["values"].contains("lambda_st_action"));
    }
  }
  CHECK(saw_decay);
  CHECK(actions == 2);
  CHECK(doc["config"].contains("seed"));
  CHECK_FALSE(doc["config"].contains("out"));
}

TEST_CASE("empty catalog is reported, not passed silently") {
  RunConfig cfg;
  cfg.suite = "energy";
  cfg.families = {"none"};
  cfg.out = scratch("empty").string();
  const RunResult r = run(cfg);
  CHECK(r.exit_code == 0);
  CHECK(r.status == "no checks run");
  const auto doc = nlohmann::json::parse(r.report_json);
  CHECK(doc["status"] == "no checks run");
  CHECK(doc["suites"]["energy"]["status"] == "no checks run");
}

TEST_CASE("failing checks give a nonzero exit and error records") {
  RunConfig cfg;
  cfg.suite = "acs";
  cfg.phi = "cubic";
  cfg.kmax = 1;
  // a decay tolerance far tighter than the fit can meet
  cfg.tol_decay = 1e-12;
  cfg.out = scratch("fail").string();
  const RunResult r = run(cfg);
  CHECK(r.exit_code == 1);
  CHECK(r.status == "fail");
  const auto doc = nlohmann::json::parse(r.report_json);
  REQUIRE(doc["errors"].size() == 1);
  CHECK(doc["errors"][0]["check"] == "acc1_decay");
  CHECK(doc["errors"][0]["kind"] == "check_failed");
}

TEST_CASE("reports do not depend on the worker count") {
  RunConfig cfg;
  cfg.suite = "monotonicity";
  cfg.families = {"polynomial", "pushforward"};
  cfg.out = scratch("jobs1").string();
  const RunResult a = run(cfg);
  cfg.jobs = 3;
  cfg.out = scratch("jobs3").string();
  const RunResult b = run(cfg);
  CHECK(a.report_json == b.report_json);
}
