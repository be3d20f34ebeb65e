#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mmpso/error.hpp"
#include "mmpso/objective.hpp"

using namespace mmpso;

namespace {

const IntervalUnion kIntervals{{{-1.8, -1.6}, {-1.2, -0.8}, {1.1, 1.3}, {1.7, 1.9}}};

const BallUnion kSixBalls{{{{-0.5, 2.2}, 0.4},
                           {{1.3, -0.8}, 0.2},
                           {{1.0, -1.3}, 0.1},
                           {{1.0, -1.0}, 0.1},
                           {{2.1, -2.0}, 0.65},
                           {{-1.0, -2.0}, 0.3}}};

// Transcriptions of the benchmark formulas, kept apart from the library code.
double ackley_ref(const std::vector<double>& x) {
  const double d = static_cast<double>(x.size());
  double sq = 0.0, cs = 0.0;
  for (double v : x) {
    sq += v * v;
    cs += std::cos(2.0 * std::numbers::pi * v);
  }
  return -20.0 * std::exp(-0.2 * std::sqrt(sq / d)) - std::exp(cs / d) + 20.0 + std::numbers::e;
}

double rastrigin_ref(const std::vector<double>& x) {
  double acc = 10.0 * static_cast<double>(x.size());
  for (double v : x) acc += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  return acc;
}

// Brute-force distance to a 1D set by scanning a fine grid of candidate points.
double scan_distance_1d(const FeasibleSet& set, double x, double lo, double hi, double h) {
  double best = INFINITY;
  for (double y = lo; y <= hi; y += h) {
    const double yy[] = {y};
    if (contains(set, yy)) best = std::min(best, std::abs(x - y));
  }
  return best;
}

}  // namespace

TEST_CASE("benchmarks vanish at the origin") {
  for (std::size_t d : {1u, 2u, 5u}) {
    std::vector<double> zero(d, 0.0);
    CHECK(eval_objective({Benchmark::ackley, d}, zero) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eval_objective({Benchmark::rastrigin, d}, zero) == 0.0);
  }
}

TEST_CASE("ackley and rastrigin match high-precision values") {
  // 40-digit evaluations of the formulas.
  const std::vector<double> x11{1.0, 1.0};
  CHECK(std::abs(eval_objective({Benchmark::ackley, 2}, x11) - 3.6253849384403628266) < 1e-12);
  CHECK(std::abs(ackley_ref(x11) - 3.6253849384403628266) < 1e-12);

  const std::vector<double> x3{0.3, -1.7, 2.5};
  CHECK(std::abs(eval_objective({Benchmark::ackley, 3}, x3) - 8.0527812256895189900) < 1e-12);
  CHECK(std::abs(eval_objective({Benchmark::rastrigin, 1}, std::vector<double>{0.5}) - 20.25) < 1e-12);
  CHECK(std::abs(eval_objective({Benchmark::rastrigin, 2}, std::vector<double>{1.2, -0.4}) - 26.6) <
        1e-12);
}

TEST_CASE("benchmarks agree with the reference transcription on random points") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> x(1 + k % 4);
    for (double& v : x) v = u(gen);
    CHECK(eval_objective({Benchmark::ackley, x.size()}, x) == doctest::Approx(ackley_ref(x)).epsilon(1e-13));
    CHECK(eval_objective({Benchmark::rastrigin, x.size()}, x) ==
          doctest::Approx(rastrigin_ref(x)).epsilon(1e-13));
  }
}

TEST_CASE("benchmarks are invariant under coordinate sign flips") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int k = 0; k < 500; ++k) {
    std::vector<double> x{u(gen), u(gen), u(gen)};
    auto y = x;
    y[k % 3] = -y[k % 3];
    for (auto b : {Benchmark::ackley, Benchmark::rastrigin}) {
      CHECK(eval_objective({b, 3}, x) == eval_objective({b, 3}, y));
    }
  }
}

TEST_CASE("dimension mismatch is a contract violation") {
  CHECK_THROWS_AS(eval_objective({Benchmark::ackley, 2}, std::vector<double>{1.0}), ContractViolation);
  CHECK_THROWS_AS(distance_to_set(FeasibleSet{kSixBalls}, std::vector<double>{1.0}), ContractViolation);
}

TEST_CASE("distance examples") {
  SUBCASE("inside a member") {
    CHECK(distance_to_set(FeasibleSet{kIntervals}, std::vector<double>{-1.0}) == 0.0);
    CHECK(distance_to_set(FeasibleSet{kSixBalls}, std::vector<double>{1.0, -1.0}) == 0.0);
    CHECK(distance_to_set(FeasibleSet{HalfLine{-0.5}}, std::vector<double>{-3.0}) == 0.0);
  }
  SUBCASE("interval union at the origin") {
    const FeasibleSet set{kIntervals};
    const double d = distance_to_set(set, std::vector<double>{0.0});
    const double oracle = scan_distance_1d(set, 0.0, -2.5, 2.5, 1e-5);
    CHECK(std::abs(oracle - 0.8) < 2e-5);
    CHECK(d == doctest::Approx(0.8).epsilon(1e-15));
  }
  SUBCASE("single ball") {
    const FeasibleSet set{BallUnion{{{{-0.5, 2.2}, 0.4}}}};
    const double d = distance_to_set(set, std::vector<double>{-0.5, 4.2});
    // Radial/angular scan of the boundary circle.
    double oracle = INFINITY;
    const double r = std::sqrt(0.4);
    for (int k = 0; k < 200000; ++k) {
      const double a = 2.0 * std::numbers::pi * k / 200000.0;
      oracle = std::min(oracle, std::hypot(-0.5 + r * std::cos(a) + 0.5, 2.2 + r * std::sin(a) - 4.2));
    }
    CHECK(std::abs(oracle - 1.3675444679663241) < 1e-9);
    CHECK(std::abs(d - 1.3675444679663241) < 1e-14);
  }
  SUBCASE("half line") {
    CHECK(distance_to_set(FeasibleSet{HalfLine{-0.5}}, std::vector<double>{0.0}) == 0.5);
    CHECK(distance_to_set(FeasibleSet{HalfLine{-0.5}}, std::vector<double>{-0.5}) == 0.0);
  }
}

TEST_CASE("distance vanishes exactly on members (10^4 random points per set)") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const FeasibleSet sets1[] = {FeasibleSet{kIntervals}, FeasibleSet{HalfLine{-0.5}}};
  for (const auto& set : sets1) {
    for (int k = 0; k < 10000; ++k) {
      const double x[] = {u(gen)};
      const double d = distance_to_set(set, x);
      CHECK(d >= 0.0);
      CHECK((d <= 1e-12) == contains(set, x));
    }
    for (double b : {-1.8, -1.6, -1.2, -0.8, 1.1, 1.3, 1.7, 1.9, -0.5}) {
      const double x[] = {b};
      CHECK((distance_to_set(set, x) <= 1e-12) == contains(set, x));
    }
  }
  const FeasibleSet balls{kSixBalls};
  for (int k = 0; k < 10000; ++k) {
    const double x[] = {u(gen), u(gen)};
    const double d = distance_to_set(balls, x);
    CHECK(d >= 0.0);
    CHECK((d <= 1e-12) == contains(balls, x));
  }
}

TEST_CASE("interval distance agrees with a dense scan") {
  const FeasibleSet set{kIntervals};
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 40; ++k) {
    const double x = u(gen);
    const double xs[] = {x};
    CHECK(std::abs(distance_to_set(set, xs) - scan_distance_1d(set, x, -2.0, 2.0, 1e-4)) <= 2e-4);
  }
}

TEST_CASE("ball-union distance agrees with a dense grid scan") {
  const FeasibleSet set{kSixBalls};
  // Members on a 1e-2 grid; distances must agree within twice the resolution.
  std::vector<std::pair<double, double>> members;
  for (double a = -3.0; a <= 3.0; a += 1e-2) {
    for (double b = -3.0; b <= 3.5; b += 1e-2) {
      const double p[] = {a, b};
      if (contains(set, p)) members.emplace_back(a, b);
    }
  }
  REQUIRE(!members.empty());
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 30; ++k) {
    const double p[] = {u(gen), u(gen)};
    double oracle = INFINITY;
    for (auto [a, b] : members) oracle = std::min(oracle, std::hypot(p[0] - a, p[1] - b));
    CHECK(std::abs(distance_to_set(set, p) - oracle) <= 2e-2);
  }
}

TEST_CASE("penalized objective") {
  const ObjectiveFunction ack1{Benchmark::ackley, 1};
  SUBCASE("beta = 0 reduces to the objective") {
    PenalizedObjective pf{ack1, FeasibleSet{HalfLine{-0.5}}, 0.0};
    for (double x : {-2.0, 0.0, 0.7}) CHECK(pf(std::vector<double>{x}) == eval_objective(ack1, std::vector<double>{x}));
  }
  SUBCASE("members pay no penalty") {
    PenalizedObjective pf{ack1, FeasibleSet{HalfLine{-0.5}}, 100.0};
    CHECK(pf(std::vector<double>{-1.0}) == eval_objective(ack1, std::vector<double>{-1.0}));
  }
  SUBCASE("half-line example") {
    PenalizedObjective pf{ack1, FeasibleSet{HalfLine{-0.5}}, 2.0};
    CHECK(eval_penalized(pf, std::vector<double>{0.0}) == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("strictly increasing in beta off the set") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> u(-3.0, 3.0), b(0.0, 10.0);
    for (int k = 0; k < 1000; ++k) {
      const std::vector<double> x{u(gen), u(gen)};
      PenalizedObjective lo{{Benchmark::rastrigin, 2}, FeasibleSet{kSixBalls}, b(gen)};
      PenalizedObjective hi = lo;
      hi.beta = lo.beta + 0.1 + b(gen);
      if (lo.penalty(x) > 0.0) CHECK(lo(x) < hi(x));
    }
  }
  SUBCASE("no set means no penalty") {
    PenalizedObjective pf{ack1, std::nullopt, 5.0};
    CHECK(pf.penalty(std::vector<double>{3.0}) == 0.0);
  }
}

TEST_CASE("set validation") {
  CHECK_THROWS_AS(validate(FeasibleSet{IntervalUnion{}}, 1), ContractViolation);
  CHECK_THROWS_AS(validate(FeasibleSet{IntervalUnion{{{1.0, 0.5}}}}, 1), ContractViolation);
  CHECK_THROWS_AS(validate(FeasibleSet{BallUnion{{{{0.0, 0.0}, -1.0}}}}, 2), ContractViolation);
  CHECK_THROWS_AS(validate(FeasibleSet{kSixBalls}, 3), ContractViolation);
  CHECK_THROWS_AS(validate(FeasibleSet{HalfLine{0.0}}, 2), ContractViolation);
  CHECK_NOTHROW(validate(FeasibleSet{kSixBalls}, 2));
  CHECK(set_dimension(FeasibleSet{kIntervals}) == 1);
}
