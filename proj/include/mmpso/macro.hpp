#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mmpso/objective.hpp"

namespace mmpso {

/// Densities below this are treated as vacuum when forming u = rho_u / rho.
inline constexpr double density_floor = 1e-12;

/// Uniform cell-centered grid on [x_min, x_max] with `cells` cells.
struct Grid1D {
  double x_min = -1.0;
  double x_max = 1.0;
  std::size_t cells = 3;

  /// Throws ContractViolation unless x_min < x_max and cells >= 3.
  void validate() const;
  double dx() const { return (x_max - x_min) / static_cast<double>(cells); }
  double center(std::size_t j) const { return x_min + (static_cast<double>(j) + 0.5) * dx(); }
  /// Cell containing x; points outside the domain map to the nearest boundary cell.
  std::size_t locate(double x) const;
  std::vector<double> centers() const;

  bool operator==(const Grid1D&) const = default;
};

enum class Boundary {
  outflow,     // zero-gradient ghost cells
  periodic,
  reflective,  // mirrored density, negated momentum: no mass crosses the walls
};

std::string_view to_string(Boundary b);
std::optional<Boundary> parse_boundary(std::string_view name);

/// Conserved variables (rho, rho u) of one cell.
struct Conserved {
  double rho = 0.0;
  double rho_u = 0.0;
};

/// Cell averages of the second-order moment system closed with a Maxwellian of temperature T.
struct MacroState {
  std::vector<double> rho;
  std::vector<double> rho_u;
  double temperature = 0.1;
  double time = 0.0;

  std::size_t size() const { return rho.size(); }
  Conserved at(std::size_t j) const { return {rho[j], rho_u[j]}; }
  double total_mass(const Grid1D& grid) const;
  /// Macroscopic velocity of cell j with the vacuum floor applied.
  double velocity(std::size_t j) const;
};

/// Uniform density carrying `mass` over the domain, zero momentum.
MacroState uniform_macro_state(const Grid1D& grid, double mass, double temperature);

/// Where the explicit source is evaluated inside the Lax–Friedrichs update.
enum class SourceStencil {
  centered,  // S(U_j): momentum lands on the odd/even sublattice the flux update does not use
  averaged,  // S(1/2 (U_{j-1} + U_{j+1})): same states that form the new cell value
};

std::string_view to_string(SourceStencil s);
std::optional<SourceStencil> parse_source_stencil(std::string_view name);

/// Coefficients of the relaxation/attraction source (gamma = 1 - m).
struct SourceParams {
  double m = 0.5;
  double lambda = 1.0;
  SourceStencil stencil = SourceStencil::averaged;
};

/// F(U) = (rho u, rho u^2 + rho T^2).
Conserved flux(Conserved u, double temperature);

/// S(U) = (0, (gamma/m) rho u + (lambda/m)(x - X) rho); it enters as dU/dt = ... - S(U).
Conserved source(Conserved u, double x, double consensus, double gamma, double m, double lambda);

/// Largest |u_j| + |T| over the grid.
double max_wavespeed(const MacroState& state);

/// dt = cfl * dx / max_j(|u_j| + |T|).
double cfl_dt(const MacroState& state, const Grid1D& grid, double cfl);

/// Gibbs-weighted center of mass of the density, evaluated by the midpoint rule.
double consensus_point_macro(const MacroState& state, const Grid1D& grid,
                             const PenalizedObjective& pf, double alpha);

/// One Lax–Friedrichs step with the source applied explicitly in the same update.
/// `source = nullopt` disables it. Throws SolverError if dt breaks the CFL bound.
MacroState lax_friedrichs_step(const MacroState& state, const Grid1D& grid, double dt,
                               const std::optional<SourceParams>& source, double consensus,
                               Boundary boundary);

/// Eigenvalues (u + |T|, u - |T|) of the quasi-linear flux Jacobian [[0, 1], [T^2 - u^2, 2u]].
std::pair<double, double> hyperbolicity_eigenvalues(Conserved u, double temperature);

/// Index of the largest entry (first one on ties).
std::size_t argmax_cell(std::span<const double> field);

}  // namespace mmpso
