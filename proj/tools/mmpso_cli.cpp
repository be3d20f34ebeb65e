// Command-line driver: run, ensemble and validate-config subcommands.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "mmpso/config.hpp"
#include "mmpso/error.hpp"
#include "mmpso/experiment.hpp"
#include "mmpso/output.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kConfigError = 2;
constexpr int kSolverError = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-scale penalized particle swarm optimization"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::size_t runs = 1;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Run one experiment and write steps.csv / summary.json");
  run->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out_dir, "Output directory (defaults to run.output)");

  auto* ensemble = app.add_subcommand("ensemble", "Run seeds seed..seed+runs-1 and pool the trajectories");
  ensemble->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  ensemble->add_option("--seed", seed, "Base seed (defaults to the config seed)");
  ensemble->add_option("--out", out_dir, "Output directory (defaults to run.output)");
  ensemble->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber);
  ensemble->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* validate = app.add_subcommand("validate-config", "Parse and validate a config, print it canonically");
  validate->add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsageError;
  }

  try {
    auto cfg = mmpso::load_config(config_path);
    if (seed) cfg.seed = *seed;
    const std::string out = out_dir.empty() ? cfg.output : out_dir;

    if (*validate) {
      std::cout << mmpso::serialize_config(cfg);
      return 0;
    }
    if (*run) {
      const auto report = mmpso::run_experiment(cfg, {out});
      std::cout << mmpso::summary_json(report, cfg.objective.dim) << '\n';
      return 0;
    }
    const auto result = mmpso::run_ensemble(cfg, runs, cfg.seed, {out}, threads);
    for (const auto& r : result.runs) {
      if (!r.report) std::cerr << r.error << '\n';
    }
    std::cout << "completed " << result.runs.size() - result.failures() << "/" << result.runs.size()
              << " runs" << (out.empty() ? "" : ", outputs in " + out) << '\n';
    return result.failures() == 0 ? 0 : kSolverError;
  } catch (const mmpso::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kSolverError;
  }
}
