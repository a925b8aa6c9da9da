#pragma once

// Generators for MAX-CUT instances shaped like the G-set families: uniform
// random graphs with unit weights (G1-G10 style) and 2D toroidal grids with
// random +-1 weights (G11-G13 style). They reproduce size, density and weight
// law, not the published files.

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "oim/ising.hpp"
#include "oim/random.hpp"

namespace oim {

// Exactly round(density * n (n - 1) / 2) distinct edges, weight 1.
inline WeightedGraph random_unit_graph(std::size_t n, double density, std::uint64_t seed) {
  if (n < 2 || !(density > 0.0 && density <= 1.0)) throw SpecError("random graph needs n >= 2 and 0 < density <= 1");
  const auto pairs = n * (n - 1) / 2;
  const auto m = static_cast<std::size_t>(std::llround(density * static_cast<double>(pairs)));
  Rng rng = make_rng(seed, Stream::kGenerator);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> edges;
  edges.reserve(m);
  while (edges.size() < m) {
    auto u = pick(rng), v = pick(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (seen.insert((static_cast<std::uint64_t>(u) << 32) | v).second) edges.push_back({u, v, 1});
  }
  return WeightedGraph(n, std::move(edges), "rand" + std::to_string(n) + "_s" + std::to_string(seed));
}

inline WeightedGraph random_pm1_torus(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kGenerator);
  std::bernoulli_distribution coin(0.5);
  std::vector<Edge> edges;
  for (auto [u, v] : torus_edges({rows, cols, false})) edges.push_back({u, v, coin(rng) ? 1 : -1});
  return WeightedGraph(rows * cols, std::move(edges),
                       "torus" + std::to_string(rows) + "x" + std::to_string(cols) + "_s" + std::to_string(seed));
}

// Surrogates for the two instances used in acceptance.
inline WeightedGraph g1_like(std::uint64_t seed = 8001) { return random_unit_graph(800, 0.06, seed); }
inline WeightedGraph g11_like(std::uint64_t seed = 8011) { return random_pm1_torus(8, 100, seed); }

}  // namespace oim
