#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mmpso/macro.hpp"
#include "mmpso/micro.hpp"

namespace mmpso {

/// Sign convention used when the macroscopic density absorbs the change of the
/// microscopic density.
///   conservative: always rho^M -= delta rho^m, clip at zero, rescale to the pre-transfer total.
///   literal:      rho^M += delta rho^m when the particle mass did not grow, -= otherwise;
///                 clip at zero, no rescale (does not conserve mass in general).
enum class TransferRule { conservative, literal };

std::string_view to_string(TransferRule r);
std::optional<TransferRule> parse_transfer_rule(std::string_view name);

struct CouplingParams {
  double zeta0 = 0.5;
  double zeta_min = 0.1;
  double zeta_max = 0.9;
  std::int64_t t_star = 0;  // first step at which mass moves between the scales
  TransferRule transfer_rule = TransferRule::conservative;

  void validate() const;
  bool operator==(const CouplingParams&) const = default;
};

struct CouplingState {
  CouplingParams params;
  double zeta = 0.5;
  /// Mass of the unweighted particle ensemble; the particles carry zeta * mu0.
  double mu0 = 1.0;
  double mu = 0.5;
  std::vector<double> rho_m_prev;
};

/// Splits `total_mass` as zeta0 : (1 - zeta0) between the swarm and the macroscopic density
/// (which is rescaled to carry its share) and records the initial microscopic density.
CouplingState start_coupling(const CouplingParams& params, double total_mass, SwarmState& swarm,
                             MacroState& macro, const Grid1D& grid);

/// Histogram density of the weighted particles; particles outside the domain are
/// binned into the nearest boundary cell, so the integral equals the swarm mass.
std::vector<double> micro_cell_density(const SwarmState& swarm, const Grid1D& grid);

/// Per-cell inputs of the zeta statistic, exposed for diagnostics and tests.
struct ZetaTerms {
  std::vector<double> weight;     // rho^m / (rho^m + rho^M)
  std::vector<double> deviation;  // |u_j - mean particle velocity|, 0 in empty cells
  std::vector<std::size_t> count; // particles per cell
  double raw = 0.0;               // unclamped ratio
};

ZetaTerms zeta_terms(const SwarmState& swarm, const MacroState& macro, const Grid1D& grid);

/// Density-weighted mean velocity mismatch normalized by its maximum over occupied cells,
/// clamped to [zeta_min, zeta_max]. Returns zeta_min when the mismatch vanishes everywhere.
double compute_zeta(const SwarmState& swarm, const MacroState& macro, const Grid1D& grid,
                    const CouplingState& coupling);

struct TransferRecord {
  bool activated = false;
  double total_before = 0.0;
  double total_after = 0.0;
};

/// Mass exchange for outer step `step`. Before t_star the masses are frozen and only the
/// reference microscopic density is refreshed. From t_star on: zeta is recomputed, the
/// particles are re-weighted to zeta * mu0 and the macroscopic density absorbs the
/// change of the microscopic density. Cell momenta are rescaled with their density so
/// the macroscopic velocity field is unchanged by the transfer.
TransferRecord transfer_mass(CouplingState& coupling, SwarmState& swarm, MacroState& macro,
                             const Grid1D& grid, std::int64_t step);

}  // namespace mmpso
