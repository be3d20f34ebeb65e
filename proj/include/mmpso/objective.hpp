#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace mmpso {

enum class Benchmark { ackley, rastrigin };

std::string_view to_string(Benchmark b);
std::optional<Benchmark> parse_benchmark(std::string_view name);

/// A benchmark objective on R^dim. Both benchmarks have their global minimum 0 at the origin.
struct ObjectiveFunction {
  Benchmark name = Benchmark::ackley;
  std::size_t dim = 1;

  bool operator==(const ObjectiveFunction&) const = default;
};

/// Evaluates the benchmark formula; throws ContractViolation if x.size() != f.dim.
double eval_objective(const ObjectiveFunction& f, std::span<const double> x);

// Feasible sets are closed: boundary points are members.

struct Ball {
  std::vector<double> center;
  double radius_sq = 0.0;

  bool operator==(const Ball&) const = default;
};

struct BallUnion {
  std::vector<Ball> balls;

  bool operator==(const BallUnion&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Interval&) const = default;
};

struct IntervalUnion {
  std::vector<Interval> intervals;

  bool operator==(const IntervalUnion&) const = default;
};

/// The half-line {x : x <= bound} in one dimension.
struct HalfLine {
  double bound = 0.0;

  bool operator==(const HalfLine&) const = default;
};

using FeasibleSet = std::variant<BallUnion, IntervalUnion, HalfLine>;

/// Throws ContractViolation for empty unions, non-positive radii, lo >= hi or
/// centers whose dimension differs from `dim`.
void validate(const FeasibleSet& set, std::size_t dim);

/// Dimension the set lives in (1 for intervals and half-lines).
std::size_t set_dimension(const FeasibleSet& set);

bool contains(const FeasibleSet& set, std::span<const double> x);

/// Euclidean distance from x to the set, evaluated in closed form per member.
double distance_to_set(const FeasibleSet& set, std::span<const double> x);

/// F_beta(x) = F(x) + beta * dist(x, M). Without a set the penalty vanishes identically.
struct PenalizedObjective {
  ObjectiveFunction objective;
  std::optional<FeasibleSet> set;
  double beta = 0.0;

  double penalty(std::span<const double> x) const;
  double operator()(std::span<const double> x) const;
};

double eval_penalized(const PenalizedObjective& pf, std::span<const double> x);

}  // namespace mmpso
