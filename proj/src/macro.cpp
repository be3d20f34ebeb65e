#include "mmpso/macro.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmpso/error.hpp"
#include "mmpso/gibbs.hpp"

namespace mmpso {

void Grid1D::validate() const {
  if (!(x_min < x_max)) throw ContractViolation("grid requires x_min < x_max");
  if (cells < 3) throw ContractViolation("grid requires at least 3 cells");
}

std::size_t Grid1D::locate(double x) const {
  const double s = std::floor((x - x_min) / dx());
  if (!(s > 0.0)) return 0;  // also catches NaN
  return std::min(static_cast<std::size_t>(s), cells - 1);
}

std::vector<double> Grid1D::centers() const {
  std::vector<double> xs(cells);
  for (std::size_t j = 0; j < cells; ++j) xs[j] = center(j);
  return xs;
}

std::string_view to_string(Boundary b) {
  switch (b) {
    case Boundary::periodic:
      return "periodic";
    case Boundary::reflective:
      return "reflective";
    case Boundary::outflow:
      break;
  }
  return "outflow";
}

std::optional<Boundary> parse_boundary(std::string_view name) {
  if (name == "outflow") return Boundary::outflow;
  if (name == "periodic") return Boundary::periodic;
  if (name == "reflective") return Boundary::reflective;
  return std::nullopt;
}

std::string_view to_string(SourceStencil s) {
  return s == SourceStencil::centered ? "centered" : "averaged";
}

std::optional<SourceStencil> parse_source_stencil(std::string_view name) {
  if (name == "centered") return SourceStencil::centered;
  if (name == "averaged") return SourceStencil::averaged;
  return std::nullopt;
}

double MacroState::total_mass(const Grid1D& grid) const {
  double acc = 0.0;
  for (double r : rho) acc += r;
  return acc * grid.dx();
}

double MacroState::velocity(std::size_t j) const {
  return rho_u[j] / std::max(rho[j], density_floor);
}

MacroState uniform_macro_state(const Grid1D& grid, double mass, double temperature) {
  grid.validate();
  if (temperature == 0.0) throw ContractViolation("closure temperature must be non-zero");
  MacroState s;
  s.rho.assign(grid.cells, mass / (grid.x_max - grid.x_min));
  s.rho_u.assign(grid.cells, 0.0);
  s.temperature = temperature;
  return s;
}

Conserved flux(Conserved u, double temperature) {
  return {u.rho_u, u.rho_u * u.rho_u / std::max(u.rho, density_floor) +
                       u.rho * temperature * temperature};
}

Conserved source(Conserved u, double x, double consensus, double gamma, double m, double lambda) {
  return {0.0, (gamma / m) * u.rho_u + (lambda / m) * (x - consensus) * u.rho};
}

double max_wavespeed(const MacroState& state) {
  const double t = std::abs(state.temperature);
  double speed = t;
  for (std::size_t j = 0; j < state.size(); ++j) {
    speed = std::max(speed, std::abs(state.velocity(j)) + t);
  }
  return speed;
}

double cfl_dt(const MacroState& state, const Grid1D& grid, double cfl) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ContractViolation("cfl must lie in (0, 1]");
  if (state.temperature == 0.0) throw ContractViolation("closure temperature must be non-zero");
  return cfl * grid.dx() / max_wavespeed(state);
}

double consensus_point_macro(const MacroState& state, const Grid1D& grid,
                             const PenalizedObjective& pf, double alpha) {
  if (!(alpha > 0.0)) throw ContractViolation("alpha must be positive");
  std::vector<double> values(grid.cells, 0.0);
  const auto xs = grid.centers();
  for (std::size_t j = 0; j < grid.cells; ++j) {
    if (state.rho[j] > 0.0) values[j] = pf({&xs[j], 1});
  }
  const auto w = gibbs_weights(values, alpha, state.rho);
  return std::clamp(weighted_mean(w, xs), grid.x_min, grid.x_max);
}

namespace {

Conserved ghost(const MacroState& s, Boundary b, bool left) {
  const std::size_t k = s.size();
  switch (b) {
    case Boundary::periodic:
      return left ? s.at(k - 1) : s.at(0);
    case Boundary::reflective: {
      const Conserved inner = left ? s.at(0) : s.at(k - 1);
      return {inner.rho, -inner.rho_u};
    }
    case Boundary::outflow:
      break;
  }
  return left ? s.at(0) : s.at(k - 1);
}

}  // namespace

MacroState lax_friedrichs_step(const MacroState& state, const Grid1D& grid, double dt,
                               const std::optional<SourceParams>& source_params, double consensus,
                               Boundary boundary) {
  const std::size_t k = grid.cells;
  if (state.size() != k || state.rho_u.size() != k) {
    throw ContractViolation("macro state does not match the grid");
  }
  if (!(dt > 0.0)) throw ContractViolation("dt must be positive");
  const double speed = max_wavespeed(state);
  const double courant = dt * speed / grid.dx();
  if (courant > 1.0 + 1e-12) {
    std::ostringstream msg;
    msg << "CFL violated: dt=" << dt << " with max wavespeed " << speed << " (Courant number "
        << courant << ")";
    throw SolverError(msg.str());
  }

  const double t = state.temperature;
  const double ratio = dt / (2.0 * grid.dx());
  const Conserved left_ghost = ghost(state, boundary, true);
  const Conserved right_ghost = ghost(state, boundary, false);
  auto cell = [&](std::ptrdiff_t j) -> Conserved {
    if (j < 0) return left_ghost;
    if (j >= static_cast<std::ptrdiff_t>(k)) return right_ghost;
    return state.at(static_cast<std::size_t>(j));
  };

  MacroState next = state;
  for (std::size_t j = 0; j < k; ++j) {
    const auto jj = static_cast<std::ptrdiff_t>(j);
    const Conserved lo = cell(jj - 1);
    const Conserved hi = cell(jj + 1);
    const Conserved f_lo = flux(lo, t);
    const Conserved f_hi = flux(hi, t);
    const Conserved mean{0.5 * (hi.rho + lo.rho), 0.5 * (hi.rho_u + lo.rho_u)};
    double rho = mean.rho - ratio * (f_hi.rho - f_lo.rho);
    double rho_u = mean.rho_u - ratio * (f_hi.rho_u - f_lo.rho_u);
    if (source_params) {
      const auto& sp = *source_params;
      const Conserved at = sp.stencil == SourceStencil::centered ? state.at(j) : mean;
      const Conserved s = source(at, grid.center(j), consensus, 1.0 - sp.m, sp.m, sp.lambda);
      rho -= dt * s.rho;
      rho_u -= dt * s.rho_u;
    }
    if (rho < 0.0) rho = 0.0;
    if (rho < density_floor) rho_u = 0.0;
    next.rho[j] = rho;
    next.rho_u[j] = rho_u;
  }
  next.time = state.time + dt;
  return next;
}

std::pair<double, double> hyperbolicity_eigenvalues(Conserved u, double temperature) {
  if (!(u.rho > 0.0)) throw ContractViolation("eigenvalues need positive density");
  const double vel = u.rho_u / u.rho;
  const double t = std::abs(temperature);
  return {vel + t, vel - t};
}

std::size_t argmax_cell(std::span<const double> field) {
  return static_cast<std::size_t>(std::distance(field.begin(),
                                                std::max_element(field.begin(), field.end())));
}

}  // namespace mmpso
