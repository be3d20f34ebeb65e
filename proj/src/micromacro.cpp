#include "mmpso/micromacro.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mmpso/error.hpp"

namespace mmpso {

std::string_view to_string(TransferRule r) {
  return r == TransferRule::conservative ? "conservative" : "literal";
}

std::optional<TransferRule> parse_transfer_rule(std::string_view name) {
  if (name == "conservative") return TransferRule::conservative;
  if (name == "literal") return TransferRule::literal;
  return std::nullopt;
}

void CouplingParams::validate() const {
  if (!(zeta_min > 0.0 && zeta_min < zeta_max && zeta_max < 1.0)) {
    throw ContractViolation("zeta bounds require 0 < zeta_min < zeta_max < 1");
  }
  if (!(zeta0 >= zeta_min && zeta0 <= zeta_max)) {
    throw ContractViolation("zeta0 must lie in [zeta_min, zeta_max]");
  }
  if (t_star < 0) throw ContractViolation("t_star must be non-negative");
}

namespace {

void require_1d(const SwarmState& swarm) {
  if (swarm.dim() != 1) {
    throw ContractViolation("micro-macro coupling needs a one-dimensional swarm, got dimension " +
                            std::to_string(swarm.dim()));
  }
}

}  // namespace

std::vector<double> micro_cell_density(const SwarmState& swarm, const Grid1D& grid) {
  require_1d(swarm);
  std::vector<double> density(grid.cells, 0.0);
  const double per_particle = swarm.particle_mass / grid.dx();
  for (Eigen::Index i = 0; i < swarm.positions.rows(); ++i) {
    density[grid.locate(swarm.positions(i, 0))] += per_particle;
  }
  return density;
}

CouplingState start_coupling(const CouplingParams& params, double total_mass, SwarmState& swarm,
                             MacroState& macro, const Grid1D& grid) {
  params.validate();
  if (!(total_mass > 0.0)) throw ContractViolation("total mass must be positive");
  CouplingState c;
  c.params = params;
  c.zeta = params.zeta0;
  c.mu0 = total_mass;
  c.mu = params.zeta0 * total_mass;
  swarm.particle_mass = c.mu / static_cast<double>(swarm.size());

  const double macro_mass = macro.total_mass(grid);
  if (!(macro_mass > 0.0)) throw ContractViolation("initial macroscopic density is empty");
  const double scale = (1.0 - params.zeta0) * total_mass / macro_mass;
  for (std::size_t j = 0; j < macro.size(); ++j) {
    macro.rho[j] *= scale;
    macro.rho_u[j] *= scale;
  }
  c.rho_m_prev = micro_cell_density(swarm, grid);
  return c;
}

ZetaTerms zeta_terms(const SwarmState& swarm, const MacroState& macro, const Grid1D& grid) {
  require_1d(swarm);
  if (macro.size() != grid.cells) throw ContractViolation("macro state does not match the grid");
  const std::size_t k = grid.cells;
  ZetaTerms terms;
  terms.weight.assign(k, 0.0);
  terms.deviation.assign(k, 0.0);
  terms.count.assign(k, 0);

  std::vector<double> velocity_sum(k, 0.0);
  for (Eigen::Index i = 0; i < swarm.positions.rows(); ++i) {
    const std::size_t j = grid.locate(swarm.positions(i, 0));
    ++terms.count[j];
    velocity_sum[j] += swarm.velocities(i, 0);
  }
  const auto rho_m = micro_cell_density(swarm, grid);

  double numerator = 0.0;
  double weight_sum = 0.0;
  double max_dev = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double both = rho_m[j] + macro.rho[j];
    terms.weight[j] = both > 0.0 ? rho_m[j] / both : 0.0;
    if (terms.count[j] > 0) {
      const double mean_v = velocity_sum[j] / static_cast<double>(terms.count[j]);
      terms.deviation[j] = std::abs(macro.velocity(j) - mean_v);
      max_dev = std::max(max_dev, terms.deviation[j]);
    }
    numerator += terms.weight[j] * terms.deviation[j];
    weight_sum += terms.weight[j];
  }
  terms.raw = (max_dev > 0.0 && weight_sum > 0.0) ? numerator / (weight_sum * max_dev) : 0.0;
  return terms;
}

double compute_zeta(const SwarmState& swarm, const MacroState& macro, const Grid1D& grid,
                    const CouplingState& coupling) {
  const auto terms = zeta_terms(swarm, macro, grid);
  const auto& p = coupling.params;
  if (!(terms.raw > 0.0)) return p.zeta_min;
  return std::clamp(terms.raw, p.zeta_min, p.zeta_max);
}

TransferRecord transfer_mass(CouplingState& coupling, SwarmState& swarm, MacroState& macro,
                             const Grid1D& grid, std::int64_t step) {
  if (step < 0) throw ContractViolation("transfer step must be non-negative");
  TransferRecord rec;
  rec.total_before = swarm.total_mass() + macro.total_mass(grid);
  if (step < coupling.params.t_star) {
    coupling.rho_m_prev = micro_cell_density(swarm, grid);
    rec.total_after = rec.total_before;
    return rec;
  }
  if (!(rec.total_before > 0.0)) {
    throw SolverError("total mass vanished at step " + std::to_string(step));
  }
  rec.activated = true;

  const double zeta = compute_zeta(swarm, macro, grid, coupling);
  const double mu_prev = swarm.total_mass();
  const double mu_new = zeta * coupling.mu0;
  swarm.particle_mass = mu_new / static_cast<double>(swarm.size());
  const auto rho_m = micro_cell_density(swarm, grid);

  const std::vector<double> rho_old = macro.rho;
  const std::size_t k = grid.cells;
  if (coupling.params.transfer_rule == TransferRule::conservative) {
    for (std::size_t j = 0; j < k; ++j) {
      macro.rho[j] = std::max(0.0, macro.rho[j] - (rho_m[j] - coupling.rho_m_prev[j]));
    }
    const double target = rec.total_before - swarm.total_mass();
    const double current = macro.total_mass(grid);
    if (!(current > 0.0)) {
      throw SolverError("macroscopic density emptied by the transfer at step " +
                        std::to_string(step));
    }
    const double scale = target / current;
    for (double& r : macro.rho) r *= scale;
  } else {
    const double sign = mu_new <= mu_prev ? 1.0 : -1.0;
    for (std::size_t j = 0; j < k; ++j) {
      macro.rho[j] = std::max(0.0, macro.rho[j] + sign * (rho_m[j] - coupling.rho_m_prev[j]));
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    macro.rho_u[j] = rho_old[j] > 0.0 ? macro.rho_u[j] * (macro.rho[j] / rho_old[j]) : 0.0;
  }

  coupling.zeta = zeta;
  coupling.mu = mu_new;
  coupling.rho_m_prev = rho_m;
  rec.total_after = swarm.total_mass() + macro.total_mass(grid);
  return rec;
}

}  // namespace mmpso
