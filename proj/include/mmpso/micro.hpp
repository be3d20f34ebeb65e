#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mmpso/objective.hpp"
#include "mmpso/rng.hpp"

namespace mmpso {

/// One row per particle.
using ParticleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Diffusion { isotropic, anisotropic };

std::string_view to_string(Diffusion d);
std::optional<Diffusion> parse_diffusion(std::string_view name);

struct MicroParams {
  double m = 0.5;       // inertia weight, (0, 1]
  double lambda = 1.0;  // drift towards the consensus point
  double sigma = 0.0;   // exploration noise
  double dt = 0.1;
  double alpha = 30.0;  // Gibbs exponent
  Diffusion diffusion = Diffusion::anisotropic;

  /// Friction coefficient, always derived from the inertia weight.
  double gamma() const { return 1.0 - m; }

  /// Throws ContractViolation naming the offending field.
  void validate() const;
};

struct SwarmState {
  ParticleMatrix positions;
  ParticleMatrix velocities;
  double particle_mass = 0.0;  // uniform weight carried by every particle
  std::int64_t step = 0;

  std::size_t size() const { return static_cast<std::size_t>(positions.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(positions.cols()); }
  double total_mass() const { return particle_mass * static_cast<double>(size()); }
  std::span<const double> position(std::size_t i) const {
    return {positions.row(static_cast<Eigen::Index>(i)).data(), dim()};
  }
};

/// Positions uniform on [lo, hi]^dim, velocities zero.
SwarmState make_swarm(std::size_t n, std::size_t dim, double lo, double hi, double particle_mass,
                      std::uint64_t seed);

/// F_beta at every particle position.
std::vector<double> evaluate_swarm(const ParticleMatrix& positions, const PenalizedObjective& pf);

/// Gibbs-weighted average of the particle positions. The result lies componentwise in the
/// hull of the positions.
Eigen::VectorXd consensus_point(const SwarmState& state, const PenalizedObjective& pf,
                                double alpha);
Eigen::VectorXd consensus_point(const ParticleMatrix& positions, std::span<const double> values,
                                double alpha);

/// Diffusion matrix D(r): either |r|_2 * I or diag(r).
struct DiffusionMatrix {
  Diffusion kind = Diffusion::anisotropic;
  double scale = 0.0;        // isotropic factor
  Eigen::VectorXd diagonal;  // anisotropic entries

  Eigen::MatrixXd dense() const;
};

DiffusionMatrix diffusion_matrix(Diffusion kind, const Eigen::VectorXd& r);

/// Number of standard normal draws needed per particle.
std::size_t noise_width(Diffusion kind, std::size_t dim);

/// Standard normal draws for one step, one row per particle. Row i depends only on
/// (seed, step, i), so any evaluation order yields the same matrix.
ParticleMatrix draw_noise(const StreamKey& key, std::int64_t step, std::size_t n,
                          std::size_t width);

/// One Euler–Maruyama step of the inertial PSO dynamics with externally supplied noise.
/// `consensus` must have been computed from `state` (pre-step).
SwarmState step_euler_maruyama(const SwarmState& state, const MicroParams& params,
                               const Eigen::VectorXd& consensus, const ParticleMatrix& theta);

/// Same step with the consensus point computed from the pre-step state.
SwarmState step_euler_maruyama(const SwarmState& state, const MicroParams& params,
                               const PenalizedObjective& pf, const ParticleMatrix& theta);

/// Same step drawing the noise for `state.step` from `key`.
SwarmState step_euler_maruyama(const SwarmState& state, const MicroParams& params,
                               const PenalizedObjective& pf, const StreamKey& key);

/// -(1/alpha) log(mean exp(-alpha F_beta)) - min F_beta, which lies in [0, log(N)/alpha].
double softmin_gap(const SwarmState& state, const PenalizedObjective& pf, double alpha);
double softmin_gap(std::span<const double> values, double alpha);

}  // namespace mmpso
