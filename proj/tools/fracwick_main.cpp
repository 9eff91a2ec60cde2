#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fracwick/config.hpp"
#include "fracwick/errors.hpp"
#include "fracwick/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fractional Brownian motion calculus: path generation, identity checks, SDE solvers"};
  app.set_version_flag("--version", std::string(fracwick::kToolVersion));

  std::string suite, config_file, out_dir;
  std::optional<std::uint64_t> seed;
  bool plots = false;
  app.add_option("suite", suite, "Suite to run")
      ->required()
      ->check(CLI::IsMember(fracwick::suite_names()));
  app.add_option("--config", config_file, "JSON experiment config")->required();
  app.add_option("--seed", seed, "Override the master seed");
  app.add_option("--out", out_dir, "Override the output directory");
  app.add_flag("--plots", plots, "Write SVG plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  fracwick::ExperimentConfig cfg;
  try {
    cfg = fracwick::load_config(config_file, suite);
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (plots) cfg.plots = true;
    fracwick::validate(cfg);
  } catch (const fracwick::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    const auto manifest = fracwick::run_suite(cfg);
    std::size_t failed = 0;
    for (const auto& r : manifest.verdicts) {
      if (!r.pass) {
        std::cerr << "FAIL " << r.test_name << '\n';
        ++failed;
      }
    }
    std::cout << suite << ": " << manifest.verdicts.size() - failed << '/'
              << manifest.verdicts.size() << " checks passed, output in "
              << (cfg.output_dir / cfg.suite).string() << '\n';
    return failed == 0 ? 0 : 1;
  } catch (const fracwick::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error in suite " << suite << ": " << e.what() << '\n';
    return 1;
  }
}
