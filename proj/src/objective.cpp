#include "mmpso/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mmpso/error.hpp"

namespace mmpso {

std::string_view to_string(Benchmark b) {
  switch (b) {
    case Benchmark::ackley:
      return "ackley";
    case Benchmark::rastrigin:
      return "rastrigin";
  }
  return "unknown";
}

std::optional<Benchmark> parse_benchmark(std::string_view name) {
  if (name == "ackley") return Benchmark::ackley;
  if (name == "rastrigin") return Benchmark::rastrigin;
  return std::nullopt;
}

namespace {

double ackley(std::span<const double> x) {
  const double d = static_cast<double>(x.size());
  double sum_sq = 0.0;
  double sum_cos = 0.0;
  for (double xi : x) {
    sum_sq += xi * xi;
    sum_cos += std::cos(2.0 * std::numbers::pi * xi);
  }
  return -20.0 * std::exp(-0.2 * std::sqrt(sum_sq / d)) - std::exp(sum_cos / d) + 20.0 +
         std::numbers::e;
}

double rastrigin(std::span<const double> x) {
  double value = 10.0 * static_cast<double>(x.size());
  for (double xi : x) value += xi * xi - 10.0 * std::cos(2.0 * std::numbers::pi * xi);
  return value;
}

double ball_distance(const Ball& ball, std::span<const double> x) {
  double sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - ball.center[k];
    sq += diff * diff;
  }
  // Squared comparison first so boundary points count as members exactly.
  if (sq <= ball.radius_sq) return 0.0;
  return std::max(0.0, std::sqrt(sq) - std::sqrt(ball.radius_sq));
}

double interval_distance(const Interval& iv, double x) {
  return std::max({iv.lo - x, 0.0, x - iv.hi});
}

void require_dim(std::span<const double> x, std::size_t dim) {
  if (x.size() != dim) {
    throw ContractViolation("point has dimension " + std::to_string(x.size()) + ", expected " +
                            std::to_string(dim));
  }
}

}  // namespace

double eval_objective(const ObjectiveFunction& f, std::span<const double> x) {
  require_dim(x, f.dim);
  switch (f.name) {
    case Benchmark::ackley:
      return ackley(x);
    case Benchmark::rastrigin:
      return rastrigin(x);
  }
  throw ContractViolation("unknown benchmark");
}

std::size_t set_dimension(const FeasibleSet& set) {
  if (const auto* balls = std::get_if<BallUnion>(&set); balls && !balls->balls.empty()) {
    return balls->balls.front().center.size();
  }
  return 1;
}

void validate(const FeasibleSet& set, std::size_t dim) {
  std::visit(
      [dim](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BallUnion>) {
          if (s.balls.empty()) throw ContractViolation("ball union is empty");
          for (const auto& b : s.balls) {
            if (b.center.size() != dim) {
              throw ContractViolation("ball center has dimension " +
                                      std::to_string(b.center.size()) + ", expected " +
                                      std::to_string(dim));
            }
            if (!(b.radius_sq > 0.0)) throw ContractViolation("ball radius^2 must be positive");
          }
        } else if constexpr (std::is_same_v<T, IntervalUnion>) {
          if (s.intervals.empty()) throw ContractViolation("interval union is empty");
          if (dim != 1) throw ContractViolation("interval union requires dimension 1");
          for (const auto& iv : s.intervals) {
            if (!(iv.lo < iv.hi)) throw ContractViolation("interval requires lo < hi");
          }
        } else {
          if (dim != 1) throw ContractViolation("half-line requires dimension 1");
          if (!std::isfinite(s.bound)) throw ContractViolation("half-line bound must be finite");
        }
      },
      set);
}

bool contains(const FeasibleSet& set, std::span<const double> x) {
  return distance_to_set(set, x) == 0.0;
}

double distance_to_set(const FeasibleSet& set, std::span<const double> x) {
  return std::visit(
      [x](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        double best = std::numeric_limits<double>::infinity();
        if constexpr (std::is_same_v<T, BallUnion>) {
          for (const auto& b : s.balls) {
            require_dim(x, b.center.size());
            best = std::min(best, ball_distance(b, x));
          }
        } else if constexpr (std::is_same_v<T, IntervalUnion>) {
          require_dim(x, 1);
          for (const auto& iv : s.intervals) best = std::min(best, interval_distance(iv, x[0]));
        } else {
          require_dim(x, 1);
          best = std::max(0.0, x[0] - s.bound);
        }
        return best;
      },
      set);
}

double PenalizedObjective::penalty(std::span<const double> x) const {
  return set ? distance_to_set(*set, x) : 0.0;
}

double PenalizedObjective::operator()(std::span<const double> x) const {
  const double f = eval_objective(objective, x);
  if (!set || beta == 0.0) return f;
  return f + beta * distance_to_set(*set, x);
}

double eval_penalized(const PenalizedObjective& pf, std::span<const double> x) { return pf(x); }

}  // namespace mmpso
