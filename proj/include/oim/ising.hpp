#pragma once

// Ising problems, spin configurations, MAX-CUT graphs and the mapping between
// them. Indices are 0-based everywhere in the library.
//
//   H(s) = - sum_{i<j} J_ij s_i s_j - sum_i h_i s_i,   s_i in {-1, +1}
//
// A MAX-CUT instance with weights w maps to J = -w, h = 0, and then
// cut(s) = (W - H(s)) / 2 with W the total edge weight.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "oim/error.hpp"
#include "oim/random.hpp"

namespace oim {

struct Coupling {
  std::size_t i = 0;
  std::size_t j = 0;
  double J = 0.0;

  friend bool operator==(const Coupling&, const Coupling&) = default;
};

// One entry of the compressed per-vertex adjacency.
struct Neighbor {
  std::uint32_t index;
  double J;
};

class SpinConfig {
 public:
  SpinConfig() = default;
  explicit SpinConfig(std::size_t n, int value = 1) : spins_(n, static_cast<std::int8_t>(value)) {
    if (value != 1 && value != -1) throw InvalidProblem("spin value must be -1 or +1");
  }
  SpinConfig(std::initializer_list<int> values) : SpinConfig(std::vector<int>(values)) {}
  explicit SpinConfig(const std::vector<int>& values) {
    spins_.reserve(values.size());
    for (int v : values) {
      if (v != 1 && v != -1) throw InvalidProblem("spin value must be -1 or +1, got " + std::to_string(v));
      spins_.push_back(static_cast<std::int8_t>(v));
    }
  }

  std::size_t size() const noexcept { return spins_.size(); }
  int operator[](std::size_t i) const noexcept { return spins_[i]; }
  void set(std::size_t i, int value) {
    if (value != 1 && value != -1) throw InvalidProblem("spin value must be -1 or +1");
    spins_[i] = static_cast<std::int8_t>(value);
  }
  void flip(std::size_t i) noexcept { spins_[i] = static_cast<std::int8_t>(-spins_[i]); }

  SpinConfig negated() const {
    SpinConfig out = *this;
    for (auto& s : out.spins_) s = static_cast<std::int8_t>(-s);
    return out;
  }

  std::vector<int> to_vector() const { return {spins_.begin(), spins_.end()}; }
  std::span<const std::int8_t> values() const noexcept { return spins_; }

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;
  friend auto operator<=>(const SpinConfig&, const SpinConfig&) = default;

 private:
  std::vector<std::int8_t> spins_;
};

class IsingProblem {
 public:
  IsingProblem() = default;

  // Couplings may be given with i > j; they are stored as i < j, sorted.
  // Self-couplings, duplicate pairs, zero or non-finite J are rejected.
  IsingProblem(std::size_t n, std::vector<Coupling> couplings, std::vector<double> fields = {},
               std::string name = {})
      : n_(n), couplings_(std::move(couplings)), fields_(std::move(fields)), name_(std::move(name)) {
    if (n_ == 0) throw InvalidProblem("problem must have at least one spin");
    if (n_ > UINT32_MAX) throw InvalidProblem("too many spins");
    if (fields_.empty()) fields_.assign(n_, 0.0);
    if (fields_.size() != n_)
      throw DimensionError("field vector has length " + std::to_string(fields_.size()) + ", expected " +
                           std::to_string(n_));
    for (double h : fields_)
      if (!std::isfinite(h)) throw InvalidProblem("non-finite field value");
    for (auto& c : couplings_) {
      if (c.i == c.j) throw InvalidProblem("self-coupling at spin " + std::to_string(c.i));
      if (c.i >= n_ || c.j >= n_)
        throw InvalidProblem("coupling (" + std::to_string(c.i) + ", " + std::to_string(c.j) +
                             ") out of range for n=" + std::to_string(n_));
      if (!std::isfinite(c.J)) throw InvalidProblem("non-finite coupling value");
      if (c.J == 0.0) throw InvalidProblem("zero coupling stored explicitly");
      if (c.i > c.j) std::swap(c.i, c.j);
    }
    std::sort(couplings_.begin(), couplings_.end(),
              [](const Coupling& a, const Coupling& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
    for (std::size_t k = 1; k < couplings_.size(); ++k)
      if (couplings_[k].i == couplings_[k - 1].i && couplings_[k].j == couplings_[k - 1].j)
        throw InvalidProblem("duplicate coupling (" + std::to_string(couplings_[k].i) + ", " +
                             std::to_string(couplings_[k].j) + ")");
    build_adjacency();
  }

  std::size_t n() const noexcept { return n_; }
  std::span<const Coupling> couplings() const noexcept { return couplings_; }
  std::span<const double> fields() const noexcept { return fields_; }
  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  bool has_fields() const noexcept {
    return std::any_of(fields_.begin(), fields_.end(), [](double h) { return h != 0.0; });
  }

  std::span<const Neighbor> neighbors(std::size_t i) const noexcept {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  // Structure-of-arrays view of the adjacency for hot loops: the neighbours of
  // i are entries [offsets[i], offsets[i + 1]) of indices/weights.
  std::span<const std::size_t> adjacency_offsets() const noexcept { return offsets_; }
  std::span<const std::uint32_t> adjacency_indices() const noexcept { return indices_; }
  std::span<const double> adjacency_weights() const noexcept { return weights_; }

  std::size_t degree(std::size_t i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
  std::size_t max_degree() const noexcept {
    std::size_t d = 0;
    for (std::size_t i = 0; i < n_; ++i) d = std::max(d, degree(i));
    return d;
  }

  // Upper bound on |H| over all configurations.
  double energy_bound() const noexcept {
    double b = 0.0;
    for (const auto& c : couplings_) b += std::abs(c.J);
    for (double h : fields_) b += std::abs(h);
    return b;
  }

  friend bool operator==(const IsingProblem& a, const IsingProblem& b) {
    return a.n_ == b.n_ && a.couplings_ == b.couplings_ && a.fields_ == b.fields_ && a.name_ == b.name_;
  }

 private:
  void build_adjacency() {
    offsets_.assign(n_ + 1, 0);
    for (const auto& c : couplings_) {
      ++offsets_[c.i + 1];
      ++offsets_[c.j + 1];
    }
    for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(offsets_[n_]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& c : couplings_) {
      adjacency_[fill[c.i]++] = {static_cast<std::uint32_t>(c.j), c.J};
      adjacency_[fill[c.j]++] = {static_cast<std::uint32_t>(c.i), c.J};
    }
    indices_.resize(adjacency_.size());
    weights_.resize(adjacency_.size());
    for (std::size_t k = 0; k < adjacency_.size(); ++k) {
      indices_[k] = adjacency_[k].index;
      weights_[k] = adjacency_[k].J;
    }
  }

  std::size_t n_ = 0;
  std::vector<Coupling> couplings_;
  std::vector<double> fields_;
  std::string name_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<std::uint32_t> indices_;
  std::vector<double> weights_;
};

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  long long w = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class WeightedGraph {
 public:
  WeightedGraph() = default;

  // Edges may be given in either orientation; stored with u < v, sorted.
  WeightedGraph(std::size_t n_vertices, std::vector<Edge> edges, std::string name = {})
      : n_(n_vertices), edges_(std::move(edges)), name_(std::move(name)) {
    if (n_ == 0) throw InvalidProblem("graph must have at least one vertex");
    for (auto& e : edges_) {
      if (e.u == e.v) throw InvalidProblem("self-loop at vertex " + std::to_string(e.u));
      if (e.u >= n_ || e.v >= n_) throw InvalidProblem("edge endpoint out of range");
      if (e.w == 0) throw InvalidProblem("zero-weight edge");
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
    for (std::size_t k = 1; k < edges_.size(); ++k)
      if (edges_[k].u == edges_[k - 1].u && edges_[k].v == edges_[k - 1].v)
        throw InvalidProblem("duplicate edge (" + std::to_string(edges_[k].u) + ", " +
                             std::to_string(edges_[k].v) + ")");
    for (const auto& e : edges_) total_weight_ += e.w;
  }

  std::size_t n_vertices() const noexcept { return n_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }
  long long total_weight() const noexcept { return total_weight_; }

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::string name_;
  long long total_weight_ = 0;
};

inline void check_dimension(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got)
    throw DimensionError(std::string(what) + ": expected " + std::to_string(expected) + " entries, got " +
                         std::to_string(got));
}

inline double hamiltonian(const IsingProblem& problem, const SpinConfig& spins) {
  check_dimension(problem.n(), spins.size(), "hamiltonian");
  double pair = 0.0;
  for (const auto& c : problem.couplings()) pair += c.J * spins[c.i] * spins[c.j];
  double field = 0.0;
  const auto h = problem.fields();
  for (std::size_t i = 0; i < problem.n(); ++i) field += h[i] * spins[i];
  return -pair - field;
}

inline long long cut_value(const WeightedGraph& graph, const SpinConfig& spins) {
  check_dimension(graph.n_vertices(), spins.size(), "cut_value");
  long long cut = 0;
  for (const auto& e : graph.edges())
    if (spins[e.u] != spins[e.v]) cut += e.w;
  return cut;
}

inline IsingProblem maxcut_to_ising(const WeightedGraph& graph) {
  std::vector<Coupling> couplings;
  couplings.reserve(graph.edges().size());
  for (const auto& e : graph.edges()) couplings.push_back({e.u, e.v, -static_cast<double>(e.w)});
  return IsingProblem(graph.n_vertices(), std::move(couplings), {}, graph.name());
}

// Inverse direction; only defined for problems with integer couplings and no fields.
inline WeightedGraph ising_to_maxcut(const IsingProblem& problem) {
  if (problem.has_fields()) throw InvalidProblem("problem with local fields has no MAX-CUT form");
  std::vector<Edge> edges;
  edges.reserve(problem.couplings().size());
  for (const auto& c : problem.couplings()) {
    const double w = -c.J;
    if (w != std::round(w)) throw InvalidProblem("non-integer coupling has no G-set form");
    edges.push_back({c.i, c.j, static_cast<long long>(w)});
  }
  return WeightedGraph(problem.n(), std::move(edges), problem.name());
}

inline double cut_from_hamiltonian(double H, double total_weight) noexcept { return (total_weight - H) / 2.0; }

namespace topology {
// Every unordered pair drawn uniformly from {0, -1, +1}.
struct Complete {};
// Each listed pair drawn uniformly from {-1, +1}.
struct EdgeSet {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};
// 2D torus with 4-neighbour links; `diagonal` adds one diagonal direction
// (down-right), giving 6 neighbours per cell. Edges collapsing onto each other
// on degenerate grids (a side of length <= 2) are kept once.
struct TorusGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool diagonal = false;
};
}  // namespace topology

using TopologySpec = std::variant<topology::Complete, topology::EdgeSet, topology::TorusGrid>;

inline std::vector<std::pair<std::size_t, std::size_t>> torus_edges(const topology::TorusGrid& grid) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  auto add = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    auto key = std::minmax(a, b);
    if (seen.insert(key).second) out.emplace_back(key);
  };
  const auto R = grid.rows, C = grid.cols;
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t c = 0; c < C; ++c) {
      const auto here = r * C + c;
      add(here, r * C + (c + 1) % C);
      add(here, ((r + 1) % R) * C + c);
      if (grid.diagonal) add(here, ((r + 1) % R) * C + (c + 1) % C);
    }
  return out;
}

inline IsingProblem random_ising(std::size_t n, const TopologySpec& topo, std::uint64_t seed) {
  if (n == 0) throw SpecError("random_ising needs n >= 1");
  Rng rng = make_rng(seed, Stream::kGenerator);
  std::vector<Coupling> couplings;
  std::string name;

  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, topology::Complete>) {
          std::uniform_int_distribution<int> three(-1, 1);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
              if (int v = three(rng); v != 0) couplings.push_back({i, j, static_cast<double>(v)});
          name = "complete" + std::to_string(n);
        } else {
          std::vector<std::pair<std::size_t, std::size_t>> edges;
          if constexpr (std::is_same_v<T, topology::TorusGrid>) {
            if (t.rows == 0 || t.cols == 0 || t.rows * t.cols != n)
              throw SpecError("torus " + std::to_string(t.rows) + "x" + std::to_string(t.cols) +
                              " does not have " + std::to_string(n) + " cells");
            edges = torus_edges(t);
            name = "torus" + std::to_string(t.rows) + "x" + std::to_string(t.cols) + (t.diagonal ? "d" : "");
          } else {
            edges = t.edges;
            name = "edgeset" + std::to_string(n);
          }
          std::bernoulli_distribution coin(0.5);
          for (auto [i, j] : edges) couplings.push_back({i, j, coin(rng) ? 1.0 : -1.0});
        }
      },
      topo);
  return IsingProblem(n, std::move(couplings), {}, name + "_s" + std::to_string(seed));
}

// Energy change from flipping spin i.
inline double flip_delta(const IsingProblem& problem, const SpinConfig& spins, std::size_t i) {
  double local = problem.fields()[i];
  for (const auto& nb : problem.neighbors(i)) local += nb.J * spins[nb.index];
  return 2.0 * spins[i] * local;
}

// Single-spin-flip sweeps in index order until no flip lowers H. Returns the
// number of flips applied.
inline std::size_t greedy_descent(const IsingProblem& problem, SpinConfig& spins) {
  check_dimension(problem.n(), spins.size(), "greedy_descent");
  std::size_t flips = 0;
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t i = 0; i < problem.n(); ++i)
      if (flip_delta(problem, spins, i) < 0.0) {
        spins.flip(i);
        ++flips;
        improved = true;
      }
  }
  return flips;
}

// Uniform random configuration, used for the trivial-solution baseline.
inline SpinConfig random_spins(std::size_t n, Rng& rng) {
  SpinConfig s(n);
  for (std::size_t i = 0; i < n; ++i)
    if (rng() & 1U) s.flip(i);
  return s;
}

}  // namespace oim
