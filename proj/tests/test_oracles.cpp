#include <gtest/gtest.h>

#include <random>

#include "oim/oracles.hpp"
#include "oracle_util.hpp"

namespace oim {
namespace {

TEST(BruteForce, FerromagneticPair) {
  const auto r = brute_force(IsingProblem(2, {{0, 1, 1.0}}));
  EXPECT_EQ(r.min_H, -1.0);
  ASSERT_EQ(r.minimizers.size(), 2u);
  EXPECT_EQ(r.minimizers[0], (SpinConfig{-1, -1}));
  EXPECT_EQ(r.minimizers[1], (SpinConfig{1, 1}));
  EXPECT_FALSE(r.truncated);
}

TEST(BruteForce, FrustratedTriangle) {
  const auto r = brute_force(testing::unit_triangle(-1.0));
  EXPECT_EQ(r.min_H, -1.0);
  EXPECT_EQ(r.minimizers.size(), 6u);
  EXPECT_EQ(r.minimizer_count, 6u);
  EXPECT_TRUE(std::is_sorted(r.minimizers.begin(), r.minimizers.end()));
}

TEST(BruteForce, SingleField) {
  const auto r = brute_force(IsingProblem(1, {}, {1.0}));
  EXPECT_EQ(r.min_H, -1.0);
  ASSERT_EQ(r.minimizers.size(), 1u);
  EXPECT_EQ(r.minimizers[0], (SpinConfig{1}));
}

TEST(BruteForce, RefusesLargeProblems) {
  EXPECT_THROW(brute_force(IsingProblem(25, {})), CapacityError);
}

TEST(BruteForce, TruncatesMinimizerList) {
  const auto r = brute_force(IsingProblem(10, {}));
  EXPECT_EQ(r.minimizer_count, 1024u);
  EXPECT_EQ(r.minimizers.size(), kMaxListedMinimizers);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.minimizers.front(), SpinConfig(std::vector<int>(10, -1)));
}

TEST(BruteForce, MatchesNaiveEnumeration) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = testing::random_problem(4 + seed % 9, 0.5, seed % 3 == 0, seed);
    const auto expected = testing::enumerate_minimum(p);
    const auto r = brute_force(p);
    EXPECT_NEAR(r.min_H, expected.min_H, 1e-9);
    EXPECT_EQ(r.minimizer_count, expected.minimizers);
    for (const auto& s : r.minimizers) EXPECT_NEAR(hamiltonian(p, s), r.min_H, 1e-9);
  }
}

TEST(BruteForce, NoRandomConfigurationBeatsMinimum) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = testing::random_problem(16, 0.4, seed % 2 == 0, seed);
    const double m = brute_force(p).min_H;
    Rng rng(seed);
    for (int k = 0; k < 1000; ++k) EXPECT_GE(hamiltonian(p, random_spins(p.n(), rng)), m - 1e-9);
  }
}

TEST(SimulatedAnnealing, BestNeverWorseThanStart) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = testing::random_problem(30, 0.3, true, seed);
    const auto r = simulated_annealing(p, {.iterations = 500, .seed = seed});
    EXPECT_LE(r.best_H, r.initial_H);
    EXPECT_EQ(r.best_H, hamiltonian(p, r.best_spins));
  }
}

TEST(SimulatedAnnealing, FrustratedTriangle) {
  const auto p = testing::unit_triangle(-1.0);
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) ok += simulated_annealing(p, {.iterations = 10000, .seed = seed}).best_H == -1.0;
  EXPECT_GE(ok, 99);
}

TEST(SimulatedAnnealing, Deterministic) {
  const auto p = testing::random_problem(40, 0.2, true, 1);
  const SaParams sa{.iterations = 20000, .seed = 5};
  const auto a = simulated_annealing(p, sa);
  const auto b = simulated_annealing(p, sa);
  EXPECT_EQ(a.best_spins, b.best_spins);
  EXPECT_EQ(a.accepted, b.accepted);
}

TEST(SimulatedAnnealing, ColdScheduleIsGreedy) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = testing::random_problem(40, 0.3, true, seed);
    const auto r = simulated_annealing(p, {.iterations = 20000, .T_initial = 1e-300, .T_final = 1e-300, .seed = seed});
    EXPECT_LE(r.largest_uphill, 0.0);
    EXPECT_LE(r.final_H, r.initial_H);
  }
}

TEST(SimulatedAnnealing, MatchesBruteForceOnSmallProblems) {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = testing::random_problem(10, 0.6, false, 100 + seed);
    ok += std::abs(simulated_annealing(p, {.iterations = 100000, .seed = seed}).best_H - brute_force(p).min_H) < 1e-9;
  }
  EXPECT_GE(ok, 48);
}

TEST(SimulatedAnnealing, RejectsBadSchedules) {
  const auto p = testing::unit_triangle(1.0);
  EXPECT_THROW(simulated_annealing(p, {.iterations = 0}), SpecError);
  EXPECT_THROW(simulated_annealing(p, {.T_final = 0.0}), SpecError);
  EXPECT_THROW(simulated_annealing(p, {.T_initial = 1e-4, .T_final = 1e-3}), SpecError);
  EXPECT_THROW(simulated_annealing(p, {.moves_per_temp = -1}), SpecError);
}

TEST(SimulatedAnnealing, DefaultStartTemperature) {
  IsingProblem p(3, {{0, 1, 2.0}, {0, 2, -1.0}}, {0.5, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(default_initial_temperature(p), 3.5);
  EXPECT_DOUBLE_EQ(default_initial_temperature(IsingProblem(2, {})), 1.0);
}

}  // namespace
}  // namespace oim
