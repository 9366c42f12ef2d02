// SPDX-License-Identifier: Apache-2.0
//
// experiment run --config <file> --out <dir>
//
// Writes <dir>/<name>.txt (aligned table) and <dir>/<name>.json.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "selfhelp/experiment.hpp"
#include "selfhelp/kvfile.hpp"

using namespace selfhelp;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Recognition accuracy versus user experience experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment config and write its report");
  std::string config_file, out_dir;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  run->add_option("--config", config_file, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--trials", trials, "Override the configured trial count");
  run->add_option("--seed", seed, "Override the configured seed");
  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = load_experiment_config(config_file);
    if (trials) cfg.trials = *trials;
    if (seed) cfg.seed = *seed;
    auto report = run_experiment(cfg);
    fs::create_directories(out_dir);
    auto table = render_report(report, ReportFormat::Table);
    std::ofstream(fs::path(out_dir) / (cfg.report_name + ".txt"), std::ios::binary) << table;
    std::ofstream(fs::path(out_dir) / (cfg.report_name + ".json"), std::ios::binary)
        << render_report(report, ReportFormat::Json);
    std::cout << table;
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
