#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmpso/config.hpp"

namespace mmpso {

/// Penalty bookkeeping of one scale for one outer step.
struct ScaleRecord {
  double beta = 0.0;
  double kappa = 0.0;
  double violation = 0.0;
  Branch branch = Branch::none;
};

/// Everything recorded after one outer step; which fields are meaningful depends on the mode.
struct StepRecord {
  std::int64_t step = 0;
  double time = 0.0;

  std::vector<double> micro_consensus;
  ScaleRecord micro;
  double softmin_gap = 0.0;

  double macro_consensus = 0.0;
  ScaleRecord macro;

  double zeta = 0.0;
  double micro_mass = 0.0;
  double macro_mass = 0.0;
  double total_mass = 0.0;
  double argmax_x = 0.0;  // cell center of the largest (combined) density
};

struct FieldSnapshot {
  std::int64_t step = 0;
  std::vector<double> x;
  std::vector<double> rho_macro;
  std::vector<double> rho_u;
  std::vector<double> rho_micro;  // empty outside micro-macro runs
};

struct RunReport {
  Mode mode = Mode::micro;
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  std::vector<double> final_consensus;
  std::vector<double> argmin_estimate;
  std::optional<double> final_beta_micro;
  std::optional<double> final_beta_macro;
  std::optional<double> final_zeta;
  FieldSnapshot final_fields;
  std::vector<FieldSnapshot> snapshots;  // every snapshot_every steps
  double wall_time_s = 0.0;

  const StepRecord& last() const { return steps.back(); }
};

struct RunOptions {
  /// Directory for CSV/JSON output; empty keeps everything in memory.
  std::filesystem::path output;
};

/// Runs the configured experiment. Solver failures abort with a SolverError naming the
/// step and a digest of the state at failure.
RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

struct EnsembleRun {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::optional<RunReport> report;
  std::string error;  // set when the run failed
};

struct EnsembleReport {
  std::vector<EnsembleRun> runs;
  std::size_t failures() const;
};

/// n_runs independent runs with seeds base_seed + k, executed on up to `threads` workers
/// (0 = hardware concurrency). A failing run is recorded and the others continue.
EnsembleReport run_ensemble(const ExperimentConfig& cfg, std::size_t n_runs,
                            std::uint64_t base_seed, const RunOptions& options = {},
                            unsigned threads = 0);

}  // namespace mmpso
