#pragma once

// JSON form of the parameter sets. Every result file embeds these so a run can
// be repeated from its own output; data/defaults.json uses the same layout.

#include <string>

#include <nlohmann/json.hpp>

#include "oim/defaults.hpp"
#include "oim/dynamics.hpp"
#include "oim/error.hpp"
#include "oim/oracles.hpp"

namespace oim {

inline nlohmann::json to_json(const KsSchedule& ks) {
  if (ks.kind == KsSchedule::Kind::kConstant) return {{"kind", "constant"}, {"level", ks.level}};
  return {{"kind", "linear"}, {"level", ks.level}, {"t0", ks.t0}, {"t1", ks.t1}};
}

inline nlohmann::json to_json(const DynamicsParams& p) {
  return {{"K", p.K},
          {"ks", to_json(p.ks)},
          {"noise_amp", p.noise_amp},
          {"variability", p.variability},
          {"cycles", p.cycles},
          {"steps_per_cycle", p.steps_per_cycle},
          {"sync_enabled", p.sync_enabled},
          {"normalize_by_degree", p.normalize_by_degree},
          {"polish", p.polish},
          {"trace_points", p.trace_points}};
}

inline nlohmann::json to_json(const SaParams& p) {
  return {{"iterations", p.iterations},
          {"T_initial", p.T_initial},
          {"T_final", p.T_final},
          {"moves_per_temp", p.moves_per_temp},
          {"seed", p.seed}};
}

namespace detail {

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out, const std::string& path) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError("wrong type", path + "/" + key);
  }
}

}  // namespace detail

inline KsSchedule ks_from_json(const nlohmann::json& j, const std::string& path = "/ks") {
  if (!j.is_object()) throw ParseError("expected an object", path);
  KsSchedule ks;
  std::string kind = "constant";
  detail::read_field(j, "kind", kind, path);
  detail::read_field(j, "level", ks.level, path);
  if (kind == "constant") {
    ks.kind = KsSchedule::Kind::kConstant;
  } else if (kind == "linear") {
    ks.kind = KsSchedule::Kind::kLinearRamp;
    detail::read_field(j, "t0", ks.t0, path);
    detail::read_field(j, "t1", ks.t1, path);
  } else {
    throw ParseError("unknown schedule kind '" + kind + "'", path + "/kind");
  }
  return ks;
}

// Missing keys keep their default values.
inline DynamicsParams dynamics_from_json(const nlohmann::json& j, const std::string& path = "") {
  if (!j.is_object()) throw ParseError("expected an object", path.empty() ? "/" : path);
  DynamicsParams p;
  detail::read_field(j, "K", p.K, path);
  if (j.contains("ks")) p.ks = ks_from_json(j.at("ks"), path + "/ks");
  detail::read_field(j, "noise_amp", p.noise_amp, path);
  detail::read_field(j, "variability", p.variability, path);
  detail::read_field(j, "cycles", p.cycles, path);
  detail::read_field(j, "steps_per_cycle", p.steps_per_cycle, path);
  detail::read_field(j, "sync_enabled", p.sync_enabled, path);
  detail::read_field(j, "normalize_by_degree", p.normalize_by_degree, path);
  detail::read_field(j, "polish", p.polish, path);
  detail::read_field(j, "trace_points", p.trace_points, path);
  return p;
}

inline SaParams sa_from_json(const nlohmann::json& j, const std::string& path = "") {
  if (!j.is_object()) throw ParseError("expected an object", path.empty() ? "/" : path);
  SaParams p;
  detail::read_field(j, "iterations", p.iterations, path);
  detail::read_field(j, "T_initial", p.T_initial, path);
  detail::read_field(j, "T_final", p.T_final, path);
  detail::read_field(j, "moves_per_temp", p.moves_per_temp, path);
  detail::read_field(j, "seed", p.seed, path);
  return p;
}

// Contents of data/defaults.json.
inline nlohmann::json defaults_json() {
  return {{"version", defaults::kDefaultsVersion},
          {"dynamics", to_json(DynamicsParams{})},
          {"sa", to_json(SaParams{})},
          {"bench", {{"runs", defaults::kRuns}, {"histogram_bins", defaults::kHistogramBins}}}};
}

}  // namespace oim
