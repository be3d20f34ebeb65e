#pragma once

#include <span>
#include <vector>

namespace mmpso {

/// Normalized Gibbs weights w_i ∝ mass_i * exp(-alpha * values_i).
///
/// The exponent is shifted by the smallest value among entries with positive mass,
/// so the leading weight is exactly 1 before normalization and nothing overflows for
/// any finite alpha. An empty `mass` means unit mass everywhere. Throws SolverError
/// when a value with positive mass is not finite or when no entry carries mass.
std::vector<double> gibbs_weights(std::span<const double> values, double alpha,
                                  std::span<const double> mass = {});

/// Sum_i w_i * samples_i for normalized weights.
double weighted_mean(std::span<const double> weights, std::span<const double> samples);

}  // namespace mmpso
