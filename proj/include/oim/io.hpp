#pragma once

// Problem file formats.
//
// G-set ("rudy") text:   n m            first non-empty line
//                        u v w          m lines, 1-based endpoints, integer w
// Ising JSON:            {"n": 3, "edges": [[0, 1, -1.0], ...], "h": [...], "name": "..."}
// Best-known catalog:    CSV with header name,best_cut,source

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "oim/error.hpp"
#include "oim/ising.hpp"

namespace oim {

namespace detail {

inline std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    const auto start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    if (pos > start) out.push_back(line.substr(start, pos - start));
  }
  return out;
}

inline std::optional<long long> parse_integer(std::string_view token) {
  long long value = 0;
  const char* first = token.data();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || first == token.data() + token.size())
    return std::nullopt;
  return value;
}

// Calls fn(line_number, line) for every line, with a trailing CR removed.
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
    pos = end + 1;
  }
}

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline WeightedGraph parse_gset(std::string_view text, std::string name = {}) {
  std::optional<std::pair<std::size_t, std::size_t>> header;
  std::vector<Edge> edges;
  std::unordered_map<std::uint64_t, std::size_t> seen;  // pair key -> line
  std::size_t last_line = 0;

  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    last_line = line_no;
    if (detail::is_blank(line)) return;
    for (char ch : line)
      if (static_cast<unsigned char>(ch) > 127) throw ParseError("non-ASCII byte", line_no);
    const auto tokens = detail::split_tokens(line);
    std::vector<long long> values;
    for (auto t : tokens) {
      auto v = detail::parse_integer(t);
      if (!v) throw ParseError("non-integer token '" + std::string(t) + "'", line_no);
      values.push_back(*v);
    }
    if (!header) {
      if (values.size() != 2) throw ParseError("header must hold 2 integers 'n m'", line_no);
      if (values[0] <= 0) throw ParseError("vertex count must be positive", line_no);
      if (values[1] < 0) throw ParseError("edge count must be non-negative", line_no);
      header = {static_cast<std::size_t>(values[0]), static_cast<std::size_t>(values[1])};
      edges.reserve(header->second);
      return;
    }
    if (values.size() != 3) throw ParseError("edge line must hold 3 integers 'u v w'", line_no);
    if (edges.size() == header->second)
      throw ParseError("more edge lines than the declared " + std::to_string(header->second), line_no);
    const long long n = static_cast<long long>(header->first);
    if (values[0] < 1 || values[0] > n || values[1] < 1 || values[1] > n)
      throw ParseError("vertex index out of range [1, " + std::to_string(n) + "]", line_no);
    if (values[0] == values[1]) throw ParseError("self-loop", line_no);
    if (values[2] == 0) throw ParseError("zero weight", line_no);
    auto u = static_cast<std::size_t>(std::min(values[0], values[1]) - 1);
    auto v = static_cast<std::size_t>(std::max(values[0], values[1]) - 1);
    const auto key = (static_cast<std::uint64_t>(u) << 32) | v;
    if (auto [it, fresh] = seen.emplace(key, line_no); !fresh)
      throw ParseError("duplicate edge, first seen on line " + std::to_string(it->second), line_no);
    edges.push_back({u, v, values[2]});
  });

  if (!header) throw ParseError("missing 'n m' header", last_line + 1);
  if (edges.size() != header->second)
    throw ParseError("declared " + std::to_string(header->second) + " edges, found " + std::to_string(edges.size()),
                     last_line + 1);
  return WeightedGraph(header->first, std::move(edges), std::move(name));
}

inline std::string write_gset(const WeightedGraph& graph) {
  std::string out;
  out.reserve(16 * (graph.edges().size() + 1));
  out += std::to_string(graph.n_vertices()) + ' ' + std::to_string(graph.edges().size()) + '\n';
  for (const auto& e : graph.edges()) {
    out += std::to_string(e.u + 1);
    out += ' ';
    out += std::to_string(e.v + 1);
    out += ' ';
    out += std::to_string(e.w);
    out += '\n';
  }
  return out;
}

namespace detail {

// Integral reals are emitted as JSON integers so that integer data round-trips
// without a trailing ".0".
inline nlohmann::json number(double x) {
  if (std::nearbyint(x) == x && std::abs(x) < 9007199254740992.0) return static_cast<long long>(x);
  return x;
}

inline std::size_t json_index(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ParseError("expected a non-negative integer", path);
  return v.get<std::size_t>();
}

inline double json_real(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number()) throw ParseError("expected a number", path);
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ParseError("non-finite number", path);
  return x;
}

}  // namespace detail

inline nlohmann::json ising_to_json(const IsingProblem& problem) {
  nlohmann::json j;
  j["n"] = problem.n();
  auto edges = nlohmann::json::array();
  for (const auto& c : problem.couplings()) edges.push_back({c.i, c.j, detail::number(c.J)});
  j["edges"] = std::move(edges);
  auto h = nlohmann::json::array();
  for (double x : problem.fields()) h.push_back(detail::number(x));
  j["h"] = std::move(h);
  if (!problem.name().empty()) j["name"] = problem.name();
  return j;
}

inline IsingProblem ising_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("expected a JSON object", "/");
  if (!j.contains("n")) throw ParseError("missing required key", "/n");
  const auto n = detail::json_index(j["n"], "/n");
  if (n == 0) throw ParseError("n must be positive", "/n");

  if (!j.contains("edges")) throw ParseError("missing required key", "/edges");
  const auto& edges = j["edges"];
  if (!edges.is_array()) throw ParseError("expected an array", "/edges");
  std::vector<Coupling> couplings;
  couplings.reserve(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string path = "/edges/" + std::to_string(k);
    const auto& e = edges[k];
    if (!e.is_array() || e.size() != 3) throw ParseError("expected [i, j, J]", path);
    Coupling c{detail::json_index(e[0], path + "/0"), detail::json_index(e[1], path + "/1"),
               detail::json_real(e[2], path + "/2")};
    if (c.i == c.j) throw ParseError("self-coupling", path);
    if (c.i >= n || c.j >= n) throw ParseError("index out of range", path);
    if (c.J == 0.0) throw ParseError("zero coupling", path + "/2");
    couplings.push_back(c);
  }

  std::vector<double> fields;
  if (j.contains("h")) {
    const auto& h = j["h"];
    if (!h.is_array()) throw ParseError("expected an array", "/h");
    if (h.size() != n) throw ParseError("length must equal n", "/h");
    for (std::size_t k = 0; k < n; ++k) fields.push_back(detail::json_real(h[k], "/h/" + std::to_string(k)));
  }

  std::string name;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ParseError("expected a string", "/name");
    name = j["name"].get<std::string>();
  }
  try {
    return IsingProblem(n, std::move(couplings), std::move(fields), std::move(name));
  } catch (const InvalidProblem& e) {
    throw ParseError(e.what(), "/edges");
  }
}

inline IsingProblem read_ising_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), "/");
  }
  return ising_from_json(j);
}

inline std::string write_ising_json(const IsingProblem& problem) { return ising_to_json(problem).dump() + "\n"; }

struct CatalogEntry {
  long long best_cut = 0;
  std::string source;
};

class BestKnownCatalog {
 public:
  void add(const std::string& name, CatalogEntry entry) {
    if (name.empty()) throw ParseError("empty instance name", "catalog");
    if (entry.best_cut <= 0) throw ParseError("best_cut must be positive for " + name, "catalog");
    if (!entries_.emplace(name, std::move(entry)).second) throw ParseError("duplicate instance " + name, "catalog");
  }
  std::optional<CatalogEntry> find(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }
  const std::map<std::string, CatalogEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<std::string, CatalogEntry> entries_;
};

inline BestKnownCatalog load_catalog(std::string_view text) {
  BestKnownCatalog catalog;
  bool have_header = false;
  detail::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (detail::is_blank(line)) return;
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
    if (!have_header) {
      if (line != "name,best_cut,source") throw ParseError("expected header 'name,best_cut,source'", line_no);
      have_header = true;
      return;
    }
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
      auto comma = line.find(',', pos);
      fields.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (fields.size() != 3) throw ParseError("expected 3 comma-separated fields", line_no);
    auto cut = detail::parse_integer(fields[1]);
    if (!cut) throw ParseError("best_cut is not an integer", line_no);
    try {
      catalog.add(std::string(fields[0]), {*cut, std::string(fields[2])});
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  });
  if (!have_header) throw ParseError("missing header", 1);
  return catalog;
}

// Best-known cut values quoted in the OIM G-set results table. SS is Scatter
// Search, SA simulated annealing; a source lists every method that reached the
// value.
inline constexpr std::string_view kBuiltinCatalogCsv =
    "name,best_cut,source\n"
    "G1,11624,SS/OIM\n"
    "G11,564,SA/OIM\n"
    "G21,931,OIM\n"
    "G31,3309,SA\n"
    "G41,2405,SA\n"
    "G51,3846,SS/OIM\n";

inline BestKnownCatalog builtin_catalog() { return load_catalog(kBuiltinCatalogCsv); }

}  // namespace oim
