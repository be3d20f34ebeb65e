#include "mmpso/micro.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mmpso/error.hpp"
#include "mmpso/gibbs.hpp"

namespace mmpso {

std::string_view to_string(Diffusion d) {
  return d == Diffusion::isotropic ? "isotropic" : "anisotropic";
}

std::optional<Diffusion> parse_diffusion(std::string_view name) {
  if (name == "isotropic") return Diffusion::isotropic;
  if (name == "anisotropic") return Diffusion::anisotropic;
  return std::nullopt;
}

void MicroParams::validate() const {
  if (!(m > 0.0 && m <= 1.0)) throw ContractViolation("m must lie in (0, 1]");
  if (!(lambda > 0.0)) throw ContractViolation("lambda must be positive");
  if (!(sigma >= 0.0)) throw ContractViolation("sigma must be non-negative");
  if (!(dt > 0.0)) throw ContractViolation("dt must be positive");
  if (!(alpha > 0.0)) throw ContractViolation("alpha must be positive");
}

SwarmState make_swarm(std::size_t n, std::size_t dim, double lo, double hi, double particle_mass,
                      std::uint64_t seed) {
  if (n == 0 || dim == 0) throw ContractViolation("swarm needs at least one particle and dimension");
  if (!(lo < hi)) throw ContractViolation("initial box requires lo < hi");
  SwarmState s;
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(dim);
  s.positions.resize(rows, cols);
  s.velocities = ParticleMatrix::Zero(rows, cols);
  s.particle_mass = particle_mass;
  const StreamKey key{seed, streams::init_positions};
  for (Eigen::Index i = 0; i < rows; ++i) {
    SplitMixEngine eng(key.derive(0, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> uni(lo, hi);
    for (Eigen::Index k = 0; k < cols; ++k) s.positions(i, k) = uni(eng);
  }
  return s;
}

std::vector<double> evaluate_swarm(const ParticleMatrix& positions, const PenalizedObjective& pf) {
  const auto n = static_cast<std::size_t>(positions.rows());
  const auto d = static_cast<std::size_t>(positions.cols());
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = pf(std::span<const double>(positions.row(static_cast<Eigen::Index>(i)).data(), d));
  }
  return values;
}

Eigen::VectorXd consensus_point(const ParticleMatrix& positions, std::span<const double> values,
                                double alpha) {
  if (positions.rows() == 0) throw ContractViolation("consensus of an empty swarm");
  if (!(alpha > 0.0)) throw ContractViolation("alpha must be positive");
  const auto w = gibbs_weights(values, alpha);
  const Eigen::Map<const Eigen::VectorXd> weights(w.data(), static_cast<Eigen::Index>(w.size()));
  Eigen::VectorXd c = positions.transpose() * weights;
  // Rounding in the normalization can push a component one ulp outside the hull.
  c = c.cwiseMax(positions.colwise().minCoeff().transpose())
          .cwiseMin(positions.colwise().maxCoeff().transpose());
  return c;
}

Eigen::VectorXd consensus_point(const SwarmState& state, const PenalizedObjective& pf,
                                double alpha) {
  return consensus_point(state.positions, evaluate_swarm(state.positions, pf), alpha);
}

Eigen::MatrixXd DiffusionMatrix::dense() const {
  if (kind == Diffusion::isotropic) {
    const auto d = diagonal.size();
    return scale * Eigen::MatrixXd::Identity(d, d);
  }
  return diagonal.asDiagonal();
}

DiffusionMatrix diffusion_matrix(Diffusion kind, const Eigen::VectorXd& r) {
  DiffusionMatrix D;
  D.kind = kind;
  if (kind == Diffusion::isotropic) {
    D.scale = r.norm();
    D.diagonal = Eigen::VectorXd::Constant(r.size(), D.scale);
  } else {
    D.diagonal = r;
  }
  return D;
}

std::size_t noise_width(Diffusion kind, std::size_t dim) {
  return kind == Diffusion::isotropic ? 1 : dim;
}

ParticleMatrix draw_noise(const StreamKey& key, std::int64_t step, std::size_t n,
                          std::size_t width) {
  ParticleMatrix theta(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
  for (Eigen::Index i = 0; i < theta.rows(); ++i) {
    SplitMixEngine eng(key.derive(static_cast<std::uint64_t>(step), static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index k = 0; k < theta.cols(); ++k) theta(i, k) = normal(eng);
  }
  return theta;
}

SwarmState step_euler_maruyama(const SwarmState& state, const MicroParams& params,
                               const Eigen::VectorXd& consensus, const ParticleMatrix& theta) {
  const auto n = state.positions.rows();
  const auto d = state.positions.cols();
  const auto width = static_cast<Eigen::Index>(noise_width(params.diffusion, static_cast<std::size_t>(d)));
  if (consensus.size() != d) throw ContractViolation("consensus dimension mismatch");
  if (theta.rows() != n || theta.cols() != width) {
    throw ContractViolation("noise matrix must be " + std::to_string(n) + "x" + std::to_string(width));
  }

  const double c = params.m + params.gamma() * params.dt;
  const double inertia = params.m / c;
  const double drift = params.lambda * params.dt / c;
  const double noise = params.sigma * std::sqrt(params.dt) / c;

  SwarmState next = state;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd r = consensus - state.positions.row(i).transpose();
    Eigen::VectorXd kick;
    if (params.diffusion == Diffusion::isotropic) {
      kick = Eigen::VectorXd::Constant(d, r.norm() * theta(i, 0));
    } else {
      kick = r.cwiseProduct(theta.row(i).transpose());
    }
    const Eigen::VectorXd v =
        inertia * state.velocities.row(i).transpose() + drift * r + noise * kick;
    next.velocities.row(i) = v.transpose();
    next.positions.row(i) = state.positions.row(i) + params.dt * v.transpose();
  }
  if (!next.positions.allFinite() || !next.velocities.allFinite()) {
    throw SolverError("non-finite swarm state after step " + std::to_string(state.step) +
                      " (parameter blow-up?)");
  }
  ++next.step;
  return next;
}

SwarmState step_euler_maruyama(const SwarmState& state, const MicroParams& params,
                               const PenalizedObjective& pf, const ParticleMatrix& theta) {
  return step_euler_maruyama(state, params, consensus_point(state, pf, params.alpha), theta);
}

SwarmState step_euler_maruyama(const SwarmState& state, const MicroParams& params,
                               const PenalizedObjective& pf, const StreamKey& key) {
  const auto theta = draw_noise(key, state.step, state.size(),
                                noise_width(params.diffusion, state.dim()));
  return step_euler_maruyama(state, params, pf, theta);
}

double softmin_gap(std::span<const double> values, double alpha) {
  if (values.empty()) throw ContractViolation("softmin_gap of an empty swarm");
  const double lo = *std::min_element(values.begin(), values.end());
  double acc = 0.0;
  for (double v : values) acc += std::exp(-alpha * (v - lo));
  // acc lies in [1, N], so the gap is non-negative up to rounding.
  const double gap = -std::log(acc / static_cast<double>(values.size())) / alpha;
  return std::max(0.0, gap);
}

double softmin_gap(const SwarmState& state, const PenalizedObjective& pf, double alpha) {
  return softmin_gap(evaluate_swarm(state.positions, pf), alpha);
}

}  // namespace mmpso
