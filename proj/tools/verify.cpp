#include "hofer/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of Hofer-energy bounds for curves in a cylindrical end"};
  std::string suite, config_path, out, phi, families;
  int jobs = 1, kmax = 5;
  std::uint64_t seed = 0;
  std::vector<std::string> sets;
  app.add_option("--suite", suite, "acs | acs-check | energy | theorem3 | monotonicity | all");
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "base seed");
  app.add_option("--out", out, "output directory");
  app.add_option("--kmax", kmax, "largest k of the z^k family");
  app.add_option("--phi", phi, "structures: all | standard | quadratic | cubic");
  app.add_option("--families", families, "catalog families, comma separated (all | none | ...)");
  app.add_option("--set", sets, "extra key=value override (repeatable)");
  CLI11_PARSE(app, argc, argv);

  hofer::cli::RunConfig cfg;
  try {
    if (!config_path.empty()) hofer::cli::load_config_file(config_path, cfg);
    // flags win over the file
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw hofer::cli::ConfigError(kv, 0, "--set expects key=value, got '" + kv + "'");
      hofer::cli::set_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (app.count("--suite")) hofer::cli::set_key(cfg, "suite", suite);
    if (app.count("--jobs")) cfg.jobs = jobs;
    if (app.count("--seed")) cfg.seed = seed;
    if (app.count("--out")) hofer::cli::set_key(cfg, "out", out);
    if (app.count("--kmax")) cfg.kmax = kmax;
    if (app.count("--phi")) hofer::cli::set_key(cfg, "phi", phi);
    if (app.count("--families")) hofer::cli::set_key(cfg, "families", families);
    hofer::cli::validate(cfg);
  } catch (const hofer::cli::ConfigError& e) {
    std::cerr << hofer::cli::error_report("config", e.what(), e.key(), e.line());
    return 2;
  }

  try {
    const hofer::cli::RunResult r = hofer::cli::run(cfg);
    std::cout << "status: " << r.status << "\n";
    for (const auto& rec : r.records)
      if (rec.counted() && rec.status != "pass")
        std::cout << "  " << rec.status << ": " << rec.suite << "/" << rec.check << " " << rec.subject << "\n";
    std::cout << "wrote " << r.files.size() << " files to " << cfg.out << "\n";
    return r.exit_code;
  } catch (const hofer::Error& e) {
    std::cerr << hofer::cli::error_report(hofer::to_string(e.kind()), e.what());
    return 2;
  }
}
