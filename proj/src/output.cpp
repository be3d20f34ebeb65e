#include "mmpso/output.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "mmpso/error.hpp"
#include "mmpso/experiment.hpp"

namespace mmpso {

std::string format_real(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw ContractViolation("cannot format real");
  return std::string(buf.data(), ptr);
}

std::vector<std::string> csv_header(Mode mode, std::size_t dim) {
  switch (mode) {
    case Mode::micro: {
      std::vector<std::string> cols{"step", "time"};
      for (std::size_t k = 1; k <= dim; ++k) cols.push_back("x_" + std::to_string(k));
      for (const char* c : {"beta", "kappa", "violation", "branch", "softmin_gap"}) cols.emplace_back(c);
      return cols;
    }
    case Mode::macro:
      return {"step", "time", "consensus", "beta", "kappa", "violation", "branch", "total_mass",
              "argmax_x"};
    case Mode::micromacro:
      return {"step",           "time",           "micro_consensus", "micro_beta",
              "micro_kappa",    "micro_violation", "micro_branch",    "macro_consensus",
              "macro_beta",     "macro_kappa",    "macro_violation", "macro_branch",
              "zeta",           "micro_mass",     "macro_mass",      "total_mass",
              "argmax_x"};
  }
  return {};
}

namespace {

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

void append_scale(std::vector<std::string>& cells, const ScaleRecord& s) {
  cells.push_back(format_real(s.beta));
  cells.push_back(format_real(s.kappa));
  cells.push_back(format_real(s.violation));
  cells.emplace_back(to_string(s.branch));
}

nlohmann::json scale_json(const ScaleRecord& s) {
  return {{"beta", s.beta}, {"kappa", s.kappa}, {"violation", s.violation},
          {"branch", std::string(to_string(s.branch))}};
}

}  // namespace

std::string csv_row(Mode mode, const StepRecord& rec) {
  std::vector<std::string> cells{std::to_string(rec.step), format_real(rec.time)};
  switch (mode) {
    case Mode::micro:
      for (double x : rec.micro_consensus) cells.push_back(format_real(x));
      append_scale(cells, rec.micro);
      cells.push_back(format_real(rec.softmin_gap));
      break;
    case Mode::macro:
      cells.push_back(format_real(rec.macro_consensus));
      append_scale(cells, rec.macro);
      cells.push_back(format_real(rec.total_mass));
      cells.push_back(format_real(rec.argmax_x));
      break;
    case Mode::micromacro:
      cells.push_back(format_real(rec.micro_consensus.empty() ? 0.0 : rec.micro_consensus[0]));
      append_scale(cells, rec.micro);
      cells.push_back(format_real(rec.macro_consensus));
      append_scale(cells, rec.macro);
      for (double v : {rec.zeta, rec.micro_mass, rec.macro_mass, rec.total_mass, rec.argmax_x}) {
        cells.push_back(format_real(v));
      }
      break;
  }
  return join(cells);
}

void write_steps_csv(std::ostream& out, Mode mode, std::size_t dim,
                     const std::vector<StepRecord>& steps) {
  out << join(csv_header(mode, dim)) << '\n';
  for (const auto& rec : steps) out << csv_row(mode, rec) << '\n';
}

void write_fields_csv(std::ostream& out, const FieldSnapshot& snap) {
  const bool micro = !snap.rho_micro.empty();
  out << (micro ? "x,rho_macro,rho_u,rho_micro,rho_total\n" : "x,rho,rho_u\n");
  for (std::size_t j = 0; j < snap.x.size(); ++j) {
    out << format_real(snap.x[j]) << ',' << format_real(snap.rho_macro[j]) << ','
        << format_real(snap.rho_u[j]);
    if (micro) {
      out << ',' << format_real(snap.rho_micro[j]) << ','
          << format_real(snap.rho_micro[j] + snap.rho_macro[j]);
    }
    out << '\n';
  }
}

std::string summary_json(const RunReport& report, std::size_t dim) {
  nlohmann::json j;
  j["mode"] = std::string(to_string(report.mode));
  j["seed"] = report.seed;
  j["final_consensus"] = report.final_consensus;
  j["argmin_estimate"] = report.argmin_estimate;
  j["final_beta"] = {{"micro", report.final_beta_micro ? nlohmann::json(*report.final_beta_micro) : nullptr},
                     {"macro", report.final_beta_macro ? nlohmann::json(*report.final_beta_macro) : nullptr}};
  j["final_zeta"] = report.final_zeta ? nlohmann::json(*report.final_zeta) : nlohmann::json(nullptr);
  if (!report.steps.empty()) {
    const auto& last = report.last();
    j["steps"] = last.step;
    j["final_time"] = last.time;
    j["final_masses"] = {{"micro", last.micro_mass}, {"macro", last.macro_mass}, {"total", last.total_mass}};
    nlohmann::json row;
    row["step"] = last.step;
    row["time"] = last.time;
    if (report.mode != Mode::macro) {
      row["micro_consensus"] = last.micro_consensus;
      row["micro"] = scale_json(last.micro);
    }
    if (report.mode == Mode::micro) row["softmin_gap"] = last.softmin_gap;
    if (report.mode != Mode::micro) {
      row["macro_consensus"] = last.macro_consensus;
      row["macro"] = scale_json(last.macro);
      row["argmax_x"] = last.argmax_x;
    }
    if (report.mode == Mode::micromacro) row["zeta"] = last.zeta;
    row["micro_mass"] = last.micro_mass;
    row["macro_mass"] = last.macro_mass;
    row["total_mass"] = last.total_mass;
    j["final_row"] = row;
  }
  j["dim"] = dim;
  j["wall_time_s"] = report.wall_time_s;
  return j.dump(2);
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw SolverError("cannot write " + p.string());
  return out;
}

}  // namespace

void write_run_outputs(const std::filesystem::path& dir, const RunReport& report, std::size_t dim) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "steps.csv");
    write_steps_csv(out, report.mode, dim, report.steps);
  }
  {
    auto out = open_out(dir / "summary.json");
    out << summary_json(report, dim) << '\n';
  }
  if (!report.final_fields.x.empty()) {
    auto out = open_out(dir / "final_fields.csv");
    write_fields_csv(out, report.final_fields);
  }
  for (const auto& snap : report.snapshots) {
    auto out = open_out(dir / ("fields_" + std::to_string(snap.step) + ".csv"));
    write_fields_csv(out, snap);
  }
}

void write_ensemble_outputs(const std::filesystem::path& dir, const EnsembleReport& report,
                            std::size_t dim) {
  std::filesystem::create_directories(dir);
  nlohmann::json runs = nlohmann::json::array();
  Mode mode = Mode::micro;
  for (const auto& run : report.runs) {
    nlohmann::json r;
    r["run"] = run.index;
    r["seed"] = run.seed;
    if (run.report) {
      mode = run.report->mode;
      r["summary"] = nlohmann::json::parse(summary_json(*run.report, dim));
    } else {
      r["error"] = run.error;
    }
    runs.push_back(std::move(r));
  }
  {
    auto out = open_out(dir / "ensemble_summary.json");
    out << nlohmann::json{{"runs", runs}, {"failures", report.failures()}}.dump(2) << '\n';
  }

  auto out = open_out(dir / "consensus_trajectories.csv");
  const std::size_t width = mode == Mode::micro ? dim : 1;
  out << "run,seed,step,time";
  for (std::size_t k = 1; k <= width; ++k) out << ",x_" << k;
  out << '\n';
  for (const auto& run : report.runs) {
    if (!run.report) continue;
    for (const auto& rec : run.report->steps) {
      out << run.index << ',' << run.seed << ',' << rec.step << ',' << format_real(rec.time);
      if (mode == Mode::macro) {
        out << ',' << format_real(rec.macro_consensus);
      } else {
        for (std::size_t k = 0; k < width; ++k) out << ',' << format_real(rec.micro_consensus[k]);
      }
      out << '\n';
    }
  }
}

}  // namespace mmpso
