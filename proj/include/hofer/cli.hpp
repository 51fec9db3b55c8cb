#pragma once

// Front end of the `verify` tool: run configuration, suites and report files.

#include "hofer/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hofer::cli {

struct RunConfig {
  // model
  int n = 2;
  double eps = 1.0;
  // structures: all | standard | quadratic | cubic
  std::string phi = "all";
  double phi_coeff = 0.1;
  // catalog: all | none | any of extremal, polynomial, perturbed, pushforward, no_zero
  std::vector<std::string> families{"all"};
  int kmax = 5;
  // acs | acs-check | energy | theorem3 | monotonicity | all
  std::string suite = "all";

  int grid = 100;
  double s_min = -8.0;
  int nt = 64;
  double bin_width = 1e-3;
  int test_functions = 100;
  std::uint64_t seed = 12345;
  std::vector<double> radii{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  std::vector<double> a_values{1.0, 2.0, 4.0};
  std::vector<double> stokes_levels{3.0, 4.0, 5.0};
  std::vector<double> decay_depths{-8, -7, -6, -5, -4, -3, -2, -1};
  double extremal_radius = 0.5;

  double tol_energy = 1e-5;        // relative, closed-form energies and periods
  double tol_omega = 1e-8;         // absolute, E_omega of trivial cylinders
  double tol_action = 1e-6;        // relative, orbit actions
  double tol_bathtub = 1e-6;       // relative Cauchy step of E_lambda in the bin width
  double tol_dominance = 1e-9;     // absolute slack for test functions against E_lambda
  double tol_monotonicity = 1e-3;  // relative, hbar(r) against pi r^2
  double tol_exponent = 0.05;      // log-log slope against 2
  double tol_ratio = 1e-6;         // absolute, extremal area ratio against pi
  double tol_decay = 0.1;          // relative, fitted decay rate against the perturbation order
  double tol_structure = 1e-8;     // J^2 + Id and flow invariance
  double tol_density = 1e-9;       // pullback densities >= -tol
  double tol_stokes = 1e-3;        // relative Stokes residual

  std::string out = "verify_out";
  int jobs = 1;
  bool plots = true;
};

/// Configuration problem with the offending key and line (0 for flags).
class ConfigError : public Error {
 public:
  ConfigError(std::string key, int line, const std::string& what)
      : Error(ErrorKind::config, what), key_(std::move(key)), line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Recognized configuration keys.
const std::vector<std::string>& config_keys();

/// Sets one key from its text form; throws ConfigError.
void set_key(RunConfig& cfg, const std::string& key, const std::string& value, int line = 0);

/// Applies `key = value` lines ('#' starts a comment).
void parse_config(std::istream& in, RunConfig& cfg);
void load_config_file(const std::string& path, RunConfig& cfg);

/// Cross-field checks (positive tolerances, known names, sizes).
void validate(const RunConfig& cfg);

/// The configuration as key = value text, in config_keys() order.
std::string to_config_text(const RunConfig& cfg);

struct Quantity {
  std::string name;
  double value = 0.0;
  double error = 0.0;
  std::optional<double> tolerance;
};

struct Record {
  std::string suite;
  std::string check;
  std::string subject;
  std::string status;  // pass | fail | error | skipped | not_applicable | excluded
  std::string note;
  std::vector<Quantity> values;

  bool counted() const { return status == "pass" || status == "fail" || status == "error"; }
  const Quantity* find(const std::string& name) const;
};

struct RunResult {
  int exit_code = 0;
  std::string status;  // pass | fail | no checks run
  std::vector<Record> records;
  std::string report_json;
  std::vector<std::string> files;  // written, relative to cfg.out
};

/// Runs the selected suites and writes report.json, CSV tables and plots
/// into cfg.out. Exit code 0 iff every counted check passes.
RunResult run(const RunConfig& cfg);

/// JSON error document for a failure before any suite ran.
std::string error_report(const std::string& kind, const std::string& message, const std::string& key = "",
                         int line = 0);

}  // namespace hofer::cli
