#include "mmpso/gibbs.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mmpso/error.hpp"

namespace mmpso {

std::vector<double> gibbs_weights(std::span<const double> values, double alpha,
                                  std::span<const double> mass) {
  const bool weighted = !mass.empty();
  if (weighted && mass.size() != values.size()) {
    throw ContractViolation("gibbs_weights: mass and values differ in length");
  }
  auto carries_mass = [&](std::size_t i) { return !weighted || mass[i] > 0.0; };

  double shift = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!carries_mass(i)) continue;
    if (!std::isfinite(values[i])) {
      throw SolverError("non-finite objective value at index " + std::to_string(i));
    }
    shift = std::min(shift, values[i]);
  }
  if (!std::isfinite(shift)) throw SolverError("gibbs_weights: zero total mass");

  std::vector<double> w(values.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!carries_mass(i)) continue;
    w[i] = std::exp(-alpha * (values[i] - shift));
    if (weighted) w[i] *= mass[i];
    total += w[i];
  }
  if (!(total > 0.0)) throw SolverError("gibbs_weights: zero total weighted mass");
  for (double& wi : w) wi /= total;
  return w;
}

double weighted_mean(std::span<const double> weights, std::span<const double> samples) {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * samples[i];
  return acc;
}

}  // namespace mmpso
