#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mmpso/error.hpp"
#include "mmpso/micromacro.hpp"

using namespace mmpso;

namespace {

SwarmState swarm_1d(const std::vector<double>& xs, const std::vector<double>& vs, double mass) {
  SwarmState s;
  s.positions.resize(static_cast<Eigen::Index>(xs.size()), 1);
  s.velocities.resize(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    s.positions(i, 0) = xs[i];
    s.velocities(i, 0) = vs.empty() ? 0.0 : vs[i];
  }
  s.particle_mass = mass;
  return s;
}

CouplingParams default_coupling(std::int64_t t_star) {
  CouplingParams p;
  p.zeta0 = 0.5;
  p.zeta_min = 0.1;
  p.zeta_max = 0.9;
  p.t_star = t_star;
  return p;
}

}  // namespace

TEST_CASE("micro cell density") {
  const Grid1D g{-1.1, 1.1, 11};  // dx = 0.2
  SUBCASE("all particles in one cell") {
    const auto s = swarm_1d({0.01, -0.05, 0.09}, {}, 0.5);
    const auto rho = micro_cell_density(s, g);
    for (std::size_t j = 0; j < 11; ++j) {
      CHECK(rho[j] == doctest::Approx(j == 5 ? 1.5 / g.dx() : 0.0));
    }
  }
  SUBCASE("zero particle mass") {
    const auto s = swarm_1d({0.3, 0.4}, {}, 0.0);
    for (double r : micro_cell_density(s, g)) CHECK(r == 0.0);
  }
  SUBCASE("seeded particles against a per-interval scan") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::vector<double> xs(10);
    for (double& x : xs) x = u(gen);
    const auto s = swarm_1d(xs, {}, 0.1);
    const auto rho = micro_cell_density(s, g);
    double integral = 0.0;
    for (std::size_t j = 0; j < 11; ++j) {
      const double lo = -1.1 + 0.2 * static_cast<double>(j);
      const double hi = lo + 0.2;
      int count = 0;
      for (double x : xs) {
        const bool first = j == 0 && x < lo;
        const bool last = j == 10 && x >= hi;
        if ((x >= lo && x < hi) || first || last) ++count;
      }
      CHECK(rho[j] == doctest::Approx(0.1 * count / 0.2).epsilon(1e-12));
      integral += rho[j] * g.dx();
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("needs a one-dimensional swarm") {
    SwarmState s;
    s.positions = ParticleMatrix::Zero(3, 2);
    s.velocities = ParticleMatrix::Zero(3, 2);
    CHECK_THROWS_AS(micro_cell_density(s, g), ContractViolation);
  }
}

TEST_CASE("zeta examples") {
  const Grid1D g{0.0, 3.0, 3};
  CouplingState c;
  c.params = default_coupling(0);
  MacroState m = uniform_macro_state(g, 3.0, 0.1);
  m.rho = {1.0, 0.5, 2.0};
  m.rho_u = {0.2, -0.1, 0.8};  // u = (0.2, -0.2, 0.4)

  SUBCASE("matching velocities give zeta_min") {
    const auto s = swarm_1d({0.5, 1.5, 2.5}, {0.2, -0.2, 0.4}, 0.25);
    CHECK(compute_zeta(s, m, g, c) == 0.1);
  }
  SUBCASE("one occupied cell gives zeta_max") {
    const auto s = swarm_1d({1.2, 1.7}, {0.3, 0.9}, 0.25);
    CHECK(zeta_terms(s, m, g).raw == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(compute_zeta(s, m, g, c) == 0.9);
  }
  SUBCASE("three-cell fixture") {
    // Cell means (0.3, 0.3, 0.5), deviations (0.1, 0.5, 0.1), weights (1/3, 1/3, 3/11):
    // raw = (2.5/11) / ((31/33) * 0.5) = 15/31.
    const auto s = swarm_1d({0.2, 0.8, 1.5, 2.1, 2.5, 2.9}, {0.5, 0.1, 0.3, 0.4, 0.4, 0.7}, 0.25);
    const auto t = zeta_terms(s, m, g);
    CHECK(t.count == std::vector<std::size_t>{2, 1, 3});
    CHECK(t.weight[2] == doctest::Approx(3.0 / 11.0).epsilon(1e-14));
    CHECK(t.deviation[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t.raw == doctest::Approx(15.0 / 31.0).epsilon(1e-14));
    CHECK(compute_zeta(s, m, g, c) == doctest::Approx(15.0 / 31.0).epsilon(1e-14));
  }
}

TEST_CASE("start splits the total mass") {
  const Grid1D g{-4.0, 4.0, 401};
  auto s = make_swarm(480, 1, -3.0, 3.0, 1.0 / 480.0, 1);
  MacroState m = uniform_macro_state(g, 1.0, 0.1);
  const auto c = start_coupling(default_coupling(240), 1.0, s, m, g);
  CHECK(s.total_mass() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(m.total_mass(g) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c.mu0 == 1.0);
  CHECK(c.zeta == 0.5);
  double micro = 0.0;
  for (double r : c.rho_m_prev) micro += r * g.dx();
  CHECK(micro == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("coupling parameter validation") {
  auto p = default_coupling(0);
  CHECK_NOTHROW(p.validate());
  p.zeta_max = 1.0;
  CHECK_THROWS_AS(p.validate(), ContractViolation);
  p = default_coupling(0);
  p.zeta0 = 0.95;
  CHECK_THROWS_AS(p.validate(), ContractViolation);
  p = default_coupling(-1);
  CHECK_THROWS_AS(p.validate(), ContractViolation);
}

TEST_CASE("transfer is frozen before t_star") {
  const Grid1D g{-4.0, 4.0, 101};
  auto s = make_swarm(50, 1, -3.0, 3.0, 0.02, 4);
  MacroState m = uniform_macro_state(g, 1.0, 0.1);
  auto c = start_coupling(default_coupling(10), 1.0, s, m, g);
  const double pm = s.particle_mass;
  const double macro_mass = m.total_mass(g);
  const auto rho = m.rho;
  for (std::int64_t step = 0; step < 10; ++step) {
    s.positions.array() += 0.05;
    const auto rec = transfer_mass(c, s, m, g, step);
    CHECK(!rec.activated);
    CHECK(s.particle_mass == pm);
    CHECK(m.total_mass(g) == macro_mass);
    CHECK(m.rho == rho);
  }
  CHECK(c.rho_m_prev == micro_cell_density(s, g));
  CHECK(transfer_mass(c, s, m, g, 10).activated);
}

TEST_CASE("stationary particles with unchanged zeta leave the macro density alone") {
  // One occupied cell with a velocity mismatch pins zeta at zeta_max, which is also zeta0.
  const Grid1D g{0.0, 3.0, 3};
  auto s = swarm_1d({1.2, 1.4, 1.6}, {0.3, 0.5, 0.1}, 0.0);
  MacroState m = uniform_macro_state(g, 1.0, 0.1);
  auto p = default_coupling(0);
  p.zeta0 = 0.9;
  auto c = start_coupling(p, 1.0, s, m, g);
  const double pm = s.particle_mass;
  const auto before = m.rho;
  for (std::int64_t step = 0; step < 5; ++step) {
    const auto rec = transfer_mass(c, s, m, g, step);
    CHECK(rec.activated);
    CHECK(c.zeta == 0.9);
    CHECK(s.particle_mass == pm);
    for (std::size_t j = 0; j < 3; ++j) CHECK(m.rho[j] == doctest::Approx(before[j]).epsilon(1e-15));
  }
}

TEST_CASE("two-step scripted transfer trace") {
  // Hand trace with exact fractions: grid [0, 5] with dx = 1, four particles, total mass 1.
  const Grid1D g{0.0, 5.0, 5};
  auto s = swarm_1d({1.5, 1.5, 3.5, 3.5}, {0.0, 0.0, 0.0, 0.0}, 0.25);
  MacroState m = uniform_macro_state(g, 1.0, 0.1);
  auto c = start_coupling(default_coupling(1), 1.0, s, m, g);
  m.rho_u[0] = 0.05;
  CHECK(s.particle_mass == 0.125);
  CHECK(m.rho[2] == doctest::Approx(0.1));

  CHECK(!transfer_mass(c, s, m, g, 0).activated);

  // Step 1: one particle moves from cell 3 to cell 4; zeta stays at 1/2.
  s.positions(3, 0) = 4.5;
  s.velocities(2, 0) = 9.0 / 14.0;
  s.velocities(3, 0) = 1.0;
  auto rec = transfer_mass(c, s, m, g, 1);
  CHECK(rec.activated);
  CHECK(c.zeta == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(rec.total_after - rec.total_before) <= 1e-12);
  const double step1[] = {2.0 / 21.0, 2.0 / 21.0, 2.0 / 21.0, 3.0 / 14.0, 0.0};
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(m.rho[j] - step1[j]) <= 1e-14);
  CHECK(std::abs(m.rho_u[0] - 1.0 / 21.0) <= 1e-14);

  // Step 2: velocities chosen so that zeta drops to 2/5; the particles now carry 0.1 each.
  s.velocities(2, 0) = 1.0;
  s.velocities(3, 0) = 1291.0 / 2755.0;
  rec = transfer_mass(c, s, m, g, 2);
  CHECK(c.zeta == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(s.particle_mass == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(std::abs(s.total_mass() - c.zeta * c.mu0) <= 1e-12);
  CHECK(std::abs(rec.total_after - rec.total_before) <= 1e-12);
  const double step2[] = {2.0 / 21.0, 61.0 / 420.0, 2.0 / 21.0, 67.0 / 280.0, 1.0 / 40.0};
  for (std::size_t j = 0; j < 5; ++j) CHECK(std::abs(m.rho[j] - step2[j]) <= 1e-12);
  CHECK(std::abs(m.rho_u[0] - 1.0 / 21.0) <= 1e-12);
}

TEST_CASE("transfers conserve the total mass on random scenarios") {
  const Grid1D g{-2.0, 2.0, 41};
  std::mt19937_64 gen(61);
  std::normal_distribution<double> jitter(0.0, 0.1);
  for (int scenario = 0; scenario < 50; ++scenario) {
    auto s = make_swarm(60, 1, -1.5, 1.5, 1.0 / 60.0, static_cast<std::uint64_t>(scenario));
    MacroState m = uniform_macro_state(g, 1.0, 0.1);
    auto c = start_coupling(default_coupling(3), 2.0, s, m, g);
    for (std::size_t j = 0; j < m.size(); ++j) m.rho_u[j] = 0.1 * jitter(gen);
    for (std::int64_t step = 0; step < 20; ++step) {
      for (Eigen::Index i = 0; i < s.positions.rows(); ++i) {
        s.velocities(i, 0) = jitter(gen);
        s.positions(i, 0) += s.velocities(i, 0);
      }
      const auto rec = transfer_mass(c, s, m, g, step);
      CHECK(std::abs(rec.total_after - rec.total_before) <= 1e-10 * rec.total_before);
      CHECK(c.zeta >= 0.1);
      CHECK(c.zeta <= 0.9);
      if (rec.activated) CHECK(std::abs(s.total_mass() - c.zeta * c.mu0) <= 1e-12);
      for (double r : m.rho) REQUIRE(r >= 0.0);
    }
  }
}

TEST_CASE("literal transfer rule follows the printed branches") {
  const Grid1D g{0.0, 5.0, 5};
  auto s = swarm_1d({1.5, 1.5, 3.5, 3.5}, {0.0, 0.0, 0.0, 0.0}, 0.25);
  MacroState m = uniform_macro_state(g, 1.0, 0.1);
  auto p = default_coupling(0);
  p.transfer_rule = TransferRule::literal;
  auto c = start_coupling(p, 1.0, s, m, g);
  // Single occupied cell after the move: zeta = 0.9 > 0.5, so the particle mass grows and
  // the literal rule subtracts the change of rho^m.
  s.positions.setConstant(2.5);
  s.velocities(0, 0) = 1.0;
  transfer_mass(c, s, m, g, 0);
  CHECK(c.zeta == 0.9);
  // rho^m: prev (0, 0.25, 0, 0.25, 0) -> (0, 0, 0.9, 0, 0); rho^M = max(0, 0.1 - delta).
  CHECK(m.rho[1] == doctest::Approx(0.35));
  CHECK(m.rho[2] == 0.0);
  CHECK(m.rho[3] == doctest::Approx(0.35));
}

TEST_CASE("transfer rejects negative steps") {
  const Grid1D g{0.0, 1.0, 3};
  auto s = swarm_1d({0.5}, {0.0}, 1.0);
  MacroState m = uniform_macro_state(g, 1.0, 0.1);
  auto c = start_coupling(default_coupling(0), 1.0, s, m, g);
  CHECK_THROWS_AS(transfer_mass(c, s, m, g, -1), ContractViolation);
}
