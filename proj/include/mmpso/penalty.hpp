#pragma once

#include <optional>
#include <string_view>

#include "mmpso/macro.hpp"
#include "mmpso/micro.hpp"
#include "mmpso/objective.hpp"

namespace mmpso {

/// How kappa reacts when the feasibility check fails.
///   divide:   kappa' = min(kappa / eta_kappa, kappa0)  (loosens the tolerance)
///   multiply: kappa' = min(kappa * eta_kappa, kappa0)
enum class KappaFailureRule { divide, multiply };

std::string_view to_string(KappaFailureRule r);
std::optional<KappaFailureRule> parse_kappa_rule(std::string_view name);

struct PenaltyParams {
  double kappa0 = 5.0;
  double eta_kappa = 1.1;
  double beta0 = 1.0;
  double eta_beta = 1.1;
  KappaFailureRule failure_kappa_rule = KappaFailureRule::divide;

  void validate() const;
  bool operator==(const PenaltyParams&) const = default;
};

enum class Branch { none, success, failure };

std::string_view to_string(Branch b);

/// Adaptive (beta, kappa) state for one scale.
struct PenaltyController {
  double beta = 1.0;
  double kappa = 5.0;
  PenaltyParams params;
  Branch last_branch = Branch::none;

  static PenaltyController start(const PenaltyParams& params);

  /// Feasibility tolerance 1 / sqrt(kappa).
  double threshold() const;
};

/// Success (violation <= 1/sqrt(kappa)): kappa grows by eta_kappa, beta kept.
/// Failure: beta grows by eta_beta and kappa follows the configured failure rule.
PenaltyController update(const PenaltyController& ctrl, double violation);

/// Gibbs-weighted mean distance of the particles to the feasible set.
double violation_micro(const SwarmState& state, const PenalizedObjective& pf, double alpha);
double violation_micro(const ParticleMatrix& positions, std::span<const double> values,
                       const PenalizedObjective& pf, double alpha);

/// Density- and Gibbs-weighted mean distance to the feasible set over the cell centers.
double violation_macro(const MacroState& macro, const Grid1D& grid, const PenalizedObjective& pf,
                       double alpha);

}  // namespace mmpso
