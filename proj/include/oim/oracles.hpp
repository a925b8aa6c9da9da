#pragma once

// Reference solvers: exhaustive enumeration for small problems and
// single-spin-flip simulated annealing for everything else.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "oim/defaults.hpp"
#include "oim/error.hpp"
#include "oim/ising.hpp"
#include "oim/random.hpp"

namespace oim {

inline constexpr std::size_t kBruteForceMaxSpins = 24;
inline constexpr std::size_t kMaxListedMinimizers = 64;

struct BruteForceResult {
  double min_H = 0.0;
  // Lexicographically smallest minimizers (-1 sorts before +1).
  std::vector<SpinConfig> minimizers;
  std::uint64_t minimizer_count = 0;
  bool truncated = false;
};

// Enumerates all 2^n configurations in Gray-code order with O(degree) energy
// updates. With h = 0 only the half with s_{n-1} = +1 is visited and every
// minimizer is reported together with its global flip.
inline BruteForceResult brute_force(const IsingProblem& problem) {
  const std::size_t n = problem.n();
  if (n > kBruteForceMaxSpins)
    throw CapacityError("brute force is limited to " + std::to_string(kBruteForceMaxSpins) + " spins, problem has " +
                        std::to_string(n));

  const bool symmetric = !problem.has_fields();
  const std::size_t free_bits = symmetric ? n - 1 : n;
  const double tol = 1e-9 * (1.0 + problem.energy_bound());

  SpinConfig s(n);
  std::vector<double> local(n);  // h_i + sum_j J_ij s_j
  for (std::size_t i = 0; i < n; ++i) {
    local[i] = problem.fields()[i];
    for (const auto& nb : problem.neighbors(i)) local[i] += nb.J;
  }
  double H = hamiltonian(problem, s);

  BruteForceResult out;
  out.min_H = std::numeric_limits<double>::infinity();
  std::vector<SpinConfig> pool;

  auto compact = [&] {
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (pool.size() > kMaxListedMinimizers) pool.resize(kMaxListedMinimizers);
  };
  auto consider = [&] {
    if (H < out.min_H - tol) {
      out.min_H = H;
      out.minimizer_count = 0;
      pool.clear();
    }
    if (H <= out.min_H + tol) {
      out.minimizer_count += symmetric ? 2 : 1;
      pool.push_back(s);
      if (symmetric) pool.push_back(s.negated());
      if (pool.size() > 8 * kMaxListedMinimizers) compact();
    }
  };

  consider();
  const std::uint64_t total = std::uint64_t{1} << free_bits;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto i = static_cast<std::size_t>(std::countr_zero(k));
    H += 2.0 * s[i] * local[i];
    s.flip(i);
    const double change = 2.0 * s[i];
    for (const auto& nb : problem.neighbors(i)) local[nb.index] += nb.J * change;
    consider();
  }

  compact();
  out.minimizers = std::move(pool);
  out.truncated = out.minimizer_count > out.minimizers.size();
  // Report the exactly evaluated energy rather than the running sum.
  out.min_H = hamiltonian(problem, out.minimizers.front());
  return out;
}

struct SaParams {
  long long iterations = defaults::kSaIterations;
  // 0 selects max_i (sum_j |J_ij| + |h_i|).
  double T_initial = 0.0;
  double T_final = defaults::kSaFinalTemperature;
  // 0 selects one sweep (n moves) per temperature level.
  long long moves_per_temp = 0;
  std::uint64_t seed = 0;

  void validate() const {
    if (iterations <= 0) throw SpecError("SA iterations must be positive");
    if (moves_per_temp < 0) throw SpecError("SA moves per temperature must be positive");
    if (!(T_final > 0.0) || !std::isfinite(T_final)) throw SpecError("SA final temperature must be > 0");
    if (T_initial != 0.0 && !(T_initial >= T_final && std::isfinite(T_initial)))
      throw SpecError("SA needs T_initial >= T_final > 0");
  }
};

inline double default_initial_temperature(const IsingProblem& problem) {
  double t = 0.0;
  for (std::size_t i = 0; i < problem.n(); ++i) {
    double row = std::abs(problem.fields()[i]);
    for (const auto& nb : problem.neighbors(i)) row += std::abs(nb.J);
    t = std::max(t, row);
  }
  return t > 0.0 ? t : 1.0;
}

struct SaResult {
  SpinConfig best_spins;
  double best_H = 0.0;
  double initial_H = 0.0;
  double final_H = 0.0;
  long long accepted = 0;
  // Largest energy increase among accepted moves.
  double largest_uphill = 0.0;
};

inline SaResult simulated_annealing(const IsingProblem& problem, const SaParams& sa) {
  sa.validate();
  const std::size_t n = problem.n();
  const double t_hi = sa.T_initial > 0.0 ? sa.T_initial : std::max(default_initial_temperature(problem), sa.T_final);
  const double t_lo = sa.T_final;
  const long long per_level = sa.moves_per_temp > 0 ? sa.moves_per_temp : static_cast<long long>(n);
  const long long levels = std::max<long long>(1, sa.iterations / per_level);
  const double decay = levels > 1 ? std::pow(t_lo / t_hi, 1.0 / static_cast<double>(levels - 1)) : 1.0;

  Rng rng = make_rng(sa.seed, Stream::kAnneal);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SpinConfig s = random_spins(n, rng);
  std::vector<double> local(n);
  for (std::size_t i = 0; i < n; ++i) {
    local[i] = problem.fields()[i];
    for (const auto& nb : problem.neighbors(i)) local[i] += nb.J * s[nb.index];
  }

  SaResult out;
  double H = hamiltonian(problem, s);
  out.initial_H = H;
  out.best_H = H;
  out.best_spins = s;

  double T = t_hi;
  long long done = 0;
  for (long long level = 0; level < levels; ++level, T *= decay) {
    const double beta = 1.0 / T;
    const long long moves = level + 1 == levels ? sa.iterations - done : per_level;
    for (long long m = 0; m < moves; ++m) {
      const std::size_t i = pick(rng);
      const double dH = 2.0 * s[i] * local[i];
      if (dH > 0.0 && unit(rng) >= std::exp(-dH * beta)) continue;
      s.flip(i);
      H += dH;
      ++out.accepted;
      out.largest_uphill = std::max(out.largest_uphill, dH);
      const double change = 2.0 * s[i];
      for (const auto& nb : problem.neighbors(i)) local[nb.index] += nb.J * change;
      if (H < out.best_H) {
        out.best_H = H;
        out.best_spins = s;
      }
    }
    done += moves;
  }
  out.final_H = hamiltonian(problem, s);
  out.best_H = hamiltonian(problem, out.best_spins);
  return out;
}

}  // namespace oim
