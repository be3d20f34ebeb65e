#include "mmpso/penalty.hpp"

#include <algorithm>
#include <cmath>

#include "mmpso/error.hpp"
#include "mmpso/gibbs.hpp"

namespace mmpso {

std::string_view to_string(KappaFailureRule r) {
  return r == KappaFailureRule::divide ? "divide" : "multiply";
}

std::optional<KappaFailureRule> parse_kappa_rule(std::string_view name) {
  if (name == "divide") return KappaFailureRule::divide;
  if (name == "multiply") return KappaFailureRule::multiply;
  return std::nullopt;
}

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::success:
      return "success";
    case Branch::failure:
      return "failure";
    case Branch::none:
      break;
  }
  return "none";
}

void PenaltyParams::validate() const {
  if (!(kappa0 > 0.0)) throw ContractViolation("kappa0 must be positive");
  if (!(eta_kappa > 1.0)) throw ContractViolation("eta_kappa must exceed 1");
  if (!(beta0 > 0.0)) throw ContractViolation("beta0 must be positive");
  if (!(eta_beta > 1.0)) throw ContractViolation("eta_beta must exceed 1");
}

PenaltyController PenaltyController::start(const PenaltyParams& params) {
  params.validate();
  return {params.beta0, params.kappa0, params, Branch::none};
}

double PenaltyController::threshold() const { return 1.0 / std::sqrt(kappa); }

PenaltyController update(const PenaltyController& ctrl, double violation) {
  PenaltyController next = ctrl;
  const auto& p = ctrl.params;
  if (violation <= ctrl.threshold()) {
    next.kappa = p.eta_kappa * ctrl.kappa;
    next.last_branch = Branch::success;
    return next;
  }
  next.beta = p.eta_beta * ctrl.beta;
  next.kappa = p.failure_kappa_rule == KappaFailureRule::divide
                   ? std::min(ctrl.kappa / p.eta_kappa, p.kappa0)
                   : std::min(ctrl.kappa * p.eta_kappa, p.kappa0);
  next.last_branch = Branch::failure;
  return next;
}

double violation_micro(const ParticleMatrix& positions, std::span<const double> values,
                       const PenalizedObjective& pf, double alpha) {
  if (!pf.set) return 0.0;
  const auto w = gibbs_weights(values, alpha);
  const auto d = static_cast<std::size_t>(positions.cols());
  std::vector<double> r(w.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = pf.penalty({positions.row(static_cast<Eigen::Index>(i)).data(), d});
  }
  const double v = weighted_mean(w, r);
  const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
  return std::clamp(v, *lo, *hi);
}

double violation_micro(const SwarmState& state, const PenalizedObjective& pf, double alpha) {
  if (state.size() == 0) throw ContractViolation("violation of an empty swarm");
  return violation_micro(state.positions, evaluate_swarm(state.positions, pf), pf, alpha);
}

double violation_macro(const MacroState& macro, const Grid1D& grid, const PenalizedObjective& pf,
                       double alpha) {
  const std::size_t k = grid.cells;
  std::vector<double> values(k, 0.0);
  std::vector<double> r(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    if (!(macro.rho[j] > 0.0)) continue;
    const double x = grid.center(j);
    values[j] = pf({&x, 1});
    r[j] = pf.penalty({&x, 1});
  }
  const auto w = gibbs_weights(values, alpha, macro.rho);
  return std::max(0.0, weighted_mean(w, r));
}

}  // namespace mmpso
