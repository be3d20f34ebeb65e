#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmpso/config.hpp"

namespace mmpso {

struct RunReport;
struct StepRecord;
struct FieldSnapshot;
struct EnsembleReport;

/// Shortest decimal text that parses back to the same double ('.' separator).
std::string format_real(double v);

/// Column names of the per-step CSV for a mode (dim only matters for micro output).
std::vector<std::string> csv_header(Mode mode, std::size_t dim);
std::string csv_row(Mode mode, const StepRecord& rec);

void write_steps_csv(std::ostream& out, Mode mode, std::size_t dim,
                     const std::vector<StepRecord>& steps);
void write_fields_csv(std::ostream& out, const FieldSnapshot& snap);

/// JSON summary of a finished run; mirrors the final CSV row under "final_row".
std::string summary_json(const RunReport& report, std::size_t dim);

/// Writes steps.csv, summary.json and final_fields.csv (when fields exist) into `dir`.
void write_run_outputs(const std::filesystem::path& dir, const RunReport& report,
                       std::size_t dim);

/// Writes ensemble_summary.json and the pooled consensus_trajectories.csv into `dir`.
void write_ensemble_outputs(const std::filesystem::path& dir, const EnsembleReport& report,
                            std::size_t dim);

}  // namespace mmpso
