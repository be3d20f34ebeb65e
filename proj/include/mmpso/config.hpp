#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "mmpso/macro.hpp"
#include "mmpso/micro.hpp"
#include "mmpso/micromacro.hpp"
#include "mmpso/objective.hpp"
#include "mmpso/penalty.hpp"

namespace mmpso {

enum class Mode { micro, macro, micromacro };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view name);

inline bool uses_micro(Mode m) { return m != Mode::macro; }
inline bool uses_macro(Mode m) { return m != Mode::micro; }

/// Parameters shared by both scales.
struct DynamicsConfig {
  double m = 0.5;
  double lambda = 1.0;
  double sigma = 0.0;
  double alpha = 30.0;

  bool operator==(const DynamicsConfig&) const = default;
};

struct MicroConfig {
  std::size_t n_particles = 0;
  Diffusion diffusion = Diffusion::anisotropic;
  double init_lo = -3.0;
  double init_hi = 3.0;

  bool operator==(const MicroConfig&) const = default;
};

struct MacroConfig {
  Grid1D grid;
  double temperature = 0.1;
  double cfl = 0.8;
  Boundary boundary = Boundary::outflow;
  SourceStencil source_stencil = SourceStencil::averaged;

  bool operator==(const MacroConfig&) const = default;
};

struct ExperimentConfig {
  Mode mode = Mode::micro;
  std::int64_t n_steps = 0;
  double dt = 0.1;
  std::uint64_t seed = 0;
  double total_mass = 1.0;
  std::string output;
  std::int64_t snapshot_every = 0;  // 0 disables field snapshots

  ObjectiveFunction objective;
  std::optional<FeasibleSet> feasible_set;
  DynamicsConfig dynamics;
  std::optional<MicroConfig> micro;
  std::optional<MacroConfig> macro;
  std::optional<PenaltyParams> penalty_micro;
  std::optional<PenaltyParams> penalty_macro;
  std::optional<CouplingParams> coupling;

  bool constrained() const { return feasible_set.has_value(); }
  MicroParams micro_params() const;
  SourceParams source_params() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses INI-style text ([section] headers, `key = value` lines, `;` comments).
/// Every problem is collected and reported in one ConfigError, each prefixed by its key path.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace mmpso
