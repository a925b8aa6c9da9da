#pragma once

// Multi-run experiments: fan runs out over a worker pool, aggregate per
// problem, build energy histograms and export plot-ready CSV/JSON.
//
// Run r of a benchmark uses seed seed_base + r for every problem, so a record
// depends only on (problem, params, seed) and never on scheduling.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "oim/dynamics.hpp"
#include "oim/error.hpp"
#include "oim/ising.hpp"
#include "oim/oracles.hpp"
#include "oim/params_io.hpp"

namespace oim {

struct BenchMode {
  enum class Kind { kStandard, kNoSync, kVariability };
  Kind kind = Kind::kStandard;
  double variability = 0.0;

  static BenchMode standard() { return {}; }
  static BenchMode no_sync() { return {Kind::kNoSync, 0.0}; }
  static BenchMode with_variability(double v) { return {Kind::kVariability, v}; }

  std::string label() const {
    switch (kind) {
      case Kind::kStandard: return "standard";
      case Kind::kNoSync: return "no_sync";
      case Kind::kVariability: {
        char buf[32];
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, variability * 100.0);
        return "variability_" + std::string(buf, end) + "pct";
      }
    }
    return "standard";
  }

  // Parameters actually integrated under this mode.
  DynamicsParams apply(DynamicsParams p) const {
    if (kind == Kind::kNoSync) p.sync_enabled = false;
    if (kind == Kind::kVariability) p.variability = variability;
    return p;
  }

  friend bool operator==(const BenchMode&, const BenchMode&) = default;
};

struct BenchProblem {
  std::string name;
  std::shared_ptr<const IsingProblem> problem;
  // MAX-CUT total weight; enables cut reporting.
  std::optional<double> total_weight;
  // Optimal (or best-known) H; enables success counting.
  std::optional<double> reference_H;
};

inline double reference_from_cut(double cut, double total_weight) { return total_weight - 2.0 * cut; }

struct BenchmarkSpec {
  std::vector<BenchProblem> problems;
  DynamicsParams params;
  int runs = defaults::kRuns;
  std::uint64_t seed_base = 0;
  BenchMode mode;

  void validate() const {
    if (runs < 1) throw SpecError("benchmark needs runs >= 1");
    if (problems.empty()) throw SpecError("benchmark has no problems");
    for (const auto& p : problems)
      if (!p.problem) throw SpecError("benchmark problem '" + p.name + "' is empty");
    if (mode.kind == BenchMode::Kind::kVariability && !(mode.variability >= 0.0))
      throw SpecError("variability must be >= 0");
    mode.apply(params).validate();
  }
};

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  double H = 0.0;
  std::optional<double> cut;
  std::optional<bool> success;
  double secs = 0.0;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct ProblemSummary {
  std::string name;
  std::size_t n = 0;
  int runs = 0;
  double best_H = 0.0;
  double mean_H = 0.0;
  double median_H = 0.0;
  double worst_H = 0.0;
  std::optional<double> best_cut;
  std::optional<double> mean_cut;
  std::optional<double> median_cut;
  std::optional<double> worst_cut;
  std::optional<double> reference_H;
  std::optional<int> success;
  double total_secs = 0.0;
  double secs_per_run = 0.0;
  std::vector<int> best_spins;
  std::vector<RunRecord> records;

  friend bool operator==(const ProblemSummary&, const ProblemSummary&) = default;
};

struct RunSummary {
  DynamicsParams params;  // as integrated, i.e. with the mode applied
  BenchMode mode;
  int runs = 0;
  std::uint64_t seed_base = 0;
  std::vector<ProblemSummary> problems;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

namespace detail {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline bool is_success(double H, double reference) {
  return H <= reference + 1e-9 * (1.0 + std::abs(reference));
}

}  // namespace detail

// Fills the aggregate fields of `s` from s.records. Timing totals are summed
// from the records as well.
inline void aggregate(ProblemSummary& s) {
  if (s.records.empty()) throw SpecError("no run records to aggregate");
  std::vector<double> hs, cuts;
  int success = 0;
  bool have_success = false;
  s.total_secs = 0.0;
  for (const auto& r : s.records) {
    hs.push_back(r.H);
    if (r.cut) cuts.push_back(*r.cut);
    if (r.success) {
      have_success = true;
      success += *r.success ? 1 : 0;
    }
    s.total_secs += r.secs;
  }
  s.runs = static_cast<int>(s.records.size());
  s.best_H = *std::min_element(hs.begin(), hs.end());
  s.worst_H = *std::max_element(hs.begin(), hs.end());
  s.mean_H = detail::mean_of(hs);
  s.median_H = detail::median_of(hs);
  if (cuts.size() == hs.size()) {
    s.best_cut = *std::max_element(cuts.begin(), cuts.end());
    s.worst_cut = *std::min_element(cuts.begin(), cuts.end());
    s.mean_cut = detail::mean_of(cuts);
    s.median_cut = detail::median_of(cuts);
  } else {
    s.best_cut = s.worst_cut = s.mean_cut = s.median_cut = std::nullopt;
  }
  s.success = have_success ? std::optional<int>(success) : std::nullopt;
  s.secs_per_run = s.total_secs / static_cast<double>(s.runs);
}

inline int default_parallelism() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline RunSummary run_benchmark(const BenchmarkSpec& spec, int parallelism = 1) {
  spec.validate();
  if (parallelism < 1) throw SpecError("parallelism must be >= 1");
  const DynamicsParams params = spec.mode.apply(spec.params);
  const std::size_t per_problem = static_cast<std::size_t>(spec.runs);
  const std::size_t total = spec.problems.size() * per_problem;

  std::vector<RunRecord> records(total);
  std::vector<SpinConfig> spins(total);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    for (std::size_t task = next++; task < total && !failed; task = next++) {
      const auto& bp = spec.problems[task / per_problem];
      const int run = static_cast<int>(task % per_problem);
      const std::uint64_t seed = spec.seed_base + static_cast<std::uint64_t>(run);
      try {
        RunResult r = simulate(*bp.problem, params, seed, bp.total_weight);
        RunRecord& rec = records[task];
        rec.run = run;
        rec.seed = seed;
        rec.H = r.final_H;
        rec.cut = r.final_cut;
        if (bp.reference_H) rec.success = detail::is_success(r.final_H, *bp.reference_H);
        rec.secs = r.wall_time.count();
        spins[task] = std::move(r.final_spins);
      } catch (const DivergenceError& e) {
        std::lock_guard lock(error_mutex);
        if (!error)
          error = std::make_exception_ptr(DivergenceError(
              "problem '" + bp.name + "' run " + std::to_string(run) + " seed " + std::to_string(seed) + ": " +
                  e.what(),
              e.step()));
        failed = true;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  const int threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(parallelism), total));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  RunSummary summary;
  summary.params = params;
  summary.mode = spec.mode;
  summary.runs = spec.runs;
  summary.seed_base = spec.seed_base;
  for (std::size_t p = 0; p < spec.problems.size(); ++p) {
    ProblemSummary s;
    s.name = spec.problems[p].name;
    s.n = spec.problems[p].problem->n();
    s.reference_H = spec.problems[p].reference_H;
    s.records.assign(records.begin() + static_cast<std::ptrdiff_t>(p * per_problem),
                     records.begin() + static_cast<std::ptrdiff_t>((p + 1) * per_problem));
    aggregate(s);
    // Lowest H, ties to the lowest run index.
    std::size_t best = 0;
    for (std::size_t r = 1; r < per_problem; ++r)
      if (s.records[r].H < s.records[best].H) best = r;
    s.best_spins = spins[p * per_problem + best].to_vector();
    summary.problems.push_back(std::move(s));
  }
  return summary;
}

// Recomputes every aggregate from the per-run records and throws if the
// stored values disagree.
inline void verify_consistency(const ProblemSummary& s) {
  ProblemSummary check = s;
  aggregate(check);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a) + std::abs(b)); };
  auto close_opt = [&](const std::optional<double>& a, const std::optional<double>& b) {
    return a.has_value() == b.has_value() && (!a || close(*a, *b));
  };
  const bool ok = check.runs == s.runs && close(check.best_H, s.best_H) && close(check.mean_H, s.mean_H) &&
                  close(check.median_H, s.median_H) && close(check.worst_H, s.worst_H) &&
                  close_opt(check.best_cut, s.best_cut) && close_opt(check.mean_cut, s.mean_cut) &&
                  close_opt(check.median_cut, s.median_cut) && close_opt(check.worst_cut, s.worst_cut) &&
                  check.success == s.success && close(check.total_secs, s.total_secs);
  if (!ok) throw Error("summary for '" + s.name + "' is inconsistent with its run records");
  if (!(s.best_H <= s.median_H && s.median_H <= s.worst_H)) throw Error("summary for '" + s.name + "' is unordered");
}

inline void verify_consistency(const RunSummary& summary) {
  for (const auto& p : summary.problems) verify_consistency(p);
}

// Best cut (or lowest H when no cut is known) of each consecutive group of
// `group` runs; a trailing partial group is dropped.
inline std::vector<double> best_of_groups(const ProblemSummary& s, int group) {
  if (group < 1) throw SpecError("group size must be >= 1");
  std::vector<double> out;
  for (std::size_t start = 0; start + static_cast<std::size_t>(group) <= s.records.size(); start += group) {
    double best = s.records[start].cut ? *s.records[start].cut : s.records[start].H;
    for (std::size_t r = start; r < start + static_cast<std::size_t>(group); ++r) {
      const auto& rec = s.records[r];
      best = rec.cut ? std::max(best, *rec.cut) : std::min(best, rec.H);
    }
    out.push_back(best);
  }
  return out;
}

struct PairedStats {
  std::size_t pairs = 0;
  double mean_difference = 0.0;  // mean of (a - b)
  double standard_error = 0.0;
};

// Paired comparison of per-run cuts (H when cuts are absent), matched by run index.
inline PairedStats paired_difference(const ProblemSummary& a, const ProblemSummary& b) {
  const std::size_t n = std::min(a.records.size(), b.records.size());
  if (n < 2) throw SpecError("paired comparison needs at least 2 pairs");
  std::vector<double> d;
  for (std::size_t r = 0; r < n; ++r) {
    if (a.records[r].seed != b.records[r].seed) throw SpecError("paired records have different seeds");
    const auto value = [](const RunRecord& rec) { return rec.cut ? *rec.cut : rec.H; };
    d.push_back(value(a.records[r]) - value(b.records[r]));
  }
  const double mean = detail::mean_of(d);
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return {n, mean, sd / std::sqrt(static_cast<double>(n))};
}

struct AblationVariant {
  std::string label;
  BenchMode mode;
  ProblemSummary summary;
};

struct AblationReport {
  std::vector<AblationVariant> variants;

  const AblationVariant& at(const std::string& label) const {
    for (const auto& v : variants)
      if (v.label == label) return v;
    throw SpecError("no ablation variant '" + label + "'");
  }
};

inline std::vector<BenchMode> default_ablation_modes() {
  return {BenchMode::standard(), BenchMode::no_sync(), BenchMode::with_variability(0.01),
          BenchMode::with_variability(0.05)};
}

// Runs every mode on one problem with identical seeds.
inline AblationReport ablation_compare(const BenchProblem& problem, const DynamicsParams& params, int runs,
                                       std::uint64_t seed_base, int parallelism = 1,
                                       const std::vector<BenchMode>& modes = default_ablation_modes()) {
  AblationReport report;
  for (const auto& mode : modes) {
    BenchmarkSpec spec{{problem}, params, runs, seed_base, mode};
    auto summary = run_benchmark(spec, parallelism);
    report.variants.push_back({mode.label(), mode, std::move(summary.problems.front())});
  }
  return report;
}

struct EnergyHistogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<std::size_t> counts;
  std::optional<double> reference;

  friend bool operator==(const EnergyHistogram&, const EnergyHistogram&) = default;
};

// Equal-width bins over [min, max] of (value - reference); the maximum lands in
// the last bin. A zero-width range puts everything in the last bin.
inline EnergyHistogram histogram(const std::vector<double>& values, std::optional<double> reference, int bins) {
  if (values.empty()) throw SpecError("histogram of an empty sample");
  if (bins < 1) throw SpecError("histogram needs at least one bin");
  const double shift = reference.value_or(0.0);
  std::vector<double> x;
  x.reserve(values.size());
  for (double v : values) x.push_back(v - shift);
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  const double width = (hi - lo) / bins;

  EnergyHistogram h;
  h.reference = reference;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (int k = 0; k < bins; ++k) h.edges.push_back(lo + k * width);
  h.edges.push_back(hi);
  for (double v : x) {
    std::size_t k = static_cast<std::size_t>(bins) - 1;
    if (width > 0.0) k = std::min(k, static_cast<std::size_t>(std::floor((v - lo) / width)));
    ++h.counts[k];
  }
  return h;
}

// H of `samples` uniform random configurations, for the trivial-solution baseline.
inline std::vector<double> random_solution_energies(const IsingProblem& problem, int samples, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::kRandomSpins);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) out.push_back(hamiltonian(problem, random_spins(problem.n(), rng)));
  return out;
}

// ---------------------------------------------------------------------------
// Export

namespace detail {

inline std::string format_number(double x) {
  if (std::nearbyint(x) == x && std::abs(x) < 9007199254740992.0) return std::to_string(static_cast<long long>(x));
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

inline std::string format_optional(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

template <class T>
nlohmann::json optional_json(const std::optional<T>& x) {
  return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
}

template <class T>
std::optional<T> json_optional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace detail

inline constexpr const char* kSummaryCsvHeader =
    "name,runs,best_H,mean_H,median_H,worst_H,best_cut,success,secs_per_run";

inline std::string summary_to_csv(const RunSummary& summary) {
  verify_consistency(summary);
  std::string out = std::string(kSummaryCsvHeader) + "\n";
  for (const auto& p : summary.problems) {
    out += p.name + "," + std::to_string(p.runs) + "," + detail::format_number(p.best_H) + "," +
           detail::format_number(p.mean_H) + "," + detail::format_number(p.median_H) + "," +
           detail::format_number(p.worst_H) + "," + detail::format_optional(p.best_cut) + "," +
           (p.success ? std::to_string(*p.success) : std::string()) + "," + detail::format_number(p.secs_per_run) +
           "\n";
  }
  return out;
}

inline constexpr const char* kRunsCsvHeader = "name,run,seed,H,cut,success,secs";

// One row per run, for plotting per-run distributions.
inline std::string runs_to_csv(const RunSummary& summary) {
  std::string out = std::string(kRunsCsvHeader) + "\n";
  for (const auto& p : summary.problems)
    for (const auto& r : p.records)
      out += p.name + "," + std::to_string(r.run) + "," + std::to_string(r.seed) + "," + detail::format_number(r.H) +
             "," + detail::format_optional(r.cut) + "," + (r.success ? (*r.success ? "1" : "0") : "") + "," +
             detail::format_number(r.secs) + "\n";
  return out;
}

inline nlohmann::json to_json(const BenchMode& m) {
  nlohmann::json j{{"kind", m.kind == BenchMode::Kind::kStandard ? "standard"
                            : m.kind == BenchMode::Kind::kNoSync ? "no_sync"
                                                                 : "variability"}};
  if (m.kind == BenchMode::Kind::kVariability) j["variability"] = m.variability;
  return j;
}

inline BenchMode mode_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "standard") return BenchMode::standard();
  if (kind == "no_sync") return BenchMode::no_sync();
  if (kind == "variability") return BenchMode::with_variability(j.at("variability").get<double>());
  throw ParseError("unknown mode '" + kind + "'", "/mode/kind");
}

inline nlohmann::json to_json(const RunRecord& r) {
  return {{"run", r.run},
          {"seed", r.seed},
          {"H", r.H},
          {"cut", detail::optional_json(r.cut)},
          {"success", detail::optional_json(r.success)},
          {"secs", r.secs}};
}

inline nlohmann::json to_json(const ProblemSummary& p) {
  auto records = nlohmann::json::array();
  for (const auto& r : p.records) records.push_back(to_json(r));
  return {{"name", p.name},
          {"n", p.n},
          {"runs", p.runs},
          {"best_H", p.best_H},
          {"mean_H", p.mean_H},
          {"median_H", p.median_H},
          {"worst_H", p.worst_H},
          {"best_cut", detail::optional_json(p.best_cut)},
          {"mean_cut", detail::optional_json(p.mean_cut)},
          {"median_cut", detail::optional_json(p.median_cut)},
          {"worst_cut", detail::optional_json(p.worst_cut)},
          {"reference_H", detail::optional_json(p.reference_H)},
          {"success", detail::optional_json(p.success)},
          {"total_secs", p.total_secs},
          {"secs_per_run", p.secs_per_run},
          {"best_spins", p.best_spins},
          {"records", std::move(records)}};
}

inline nlohmann::json to_json(const RunSummary& s) {
  verify_consistency(s);
  auto problems = nlohmann::json::array();
  for (const auto& p : s.problems) problems.push_back(to_json(p));
  return {{"params", to_json(s.params)},
          {"mode", to_json(s.mode)},
          {"runs", s.runs},
          {"seed_base", s.seed_base},
          {"problems", std::move(problems)}};
}

inline RunSummary summary_from_json(const nlohmann::json& j) {
  RunSummary s;
  try {
    s.params = dynamics_from_json(j.at("params"), "/params");
    s.mode = mode_from_json(j.at("mode"));
    s.runs = j.at("runs").get<int>();
    s.seed_base = j.at("seed_base").get<std::uint64_t>();
    for (const auto& pj : j.at("problems")) {
      ProblemSummary p;
      p.name = pj.at("name").get<std::string>();
      p.n = pj.at("n").get<std::size_t>();
      p.runs = pj.at("runs").get<int>();
      p.best_H = pj.at("best_H").get<double>();
      p.mean_H = pj.at("mean_H").get<double>();
      p.median_H = pj.at("median_H").get<double>();
      p.worst_H = pj.at("worst_H").get<double>();
      p.best_cut = detail::json_optional<double>(pj, "best_cut");
      p.mean_cut = detail::json_optional<double>(pj, "mean_cut");
      p.median_cut = detail::json_optional<double>(pj, "median_cut");
      p.worst_cut = detail::json_optional<double>(pj, "worst_cut");
      p.reference_H = detail::json_optional<double>(pj, "reference_H");
      p.success = detail::json_optional<int>(pj, "success");
      p.total_secs = pj.at("total_secs").get<double>();
      p.secs_per_run = pj.at("secs_per_run").get<double>();
      p.best_spins = pj.at("best_spins").get<std::vector<int>>();
      for (const auto& rj : pj.at("records")) {
        RunRecord r;
        r.run = rj.at("run").get<int>();
        r.seed = rj.at("seed").get<std::uint64_t>();
        r.H = rj.at("H").get<double>();
        r.cut = detail::json_optional<double>(rj, "cut");
        r.success = detail::json_optional<bool>(rj, "success");
        r.secs = rj.at("secs").get<double>();
        p.records.push_back(r);
      }
      s.problems.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), "/");
  }
  return s;
}

inline constexpr const char* kHistogramCsvHeader = "bin_lo,bin_hi,count";

inline std::string histogram_to_csv(const EnergyHistogram& h) {
  std::string out = std::string(kHistogramCsvHeader) + "\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k)
    out += detail::format_number(h.edges[k]) + "," + detail::format_number(h.edges[k + 1]) + "," +
           std::to_string(h.counts[k]) + "\n";
  return out;
}

inline nlohmann::json to_json(const EnergyHistogram& h) {
  return {{"edges", h.edges}, {"counts", h.counts}, {"reference", detail::optional_json(h.reference)}};
}

inline EnergyHistogram histogram_from_json(const nlohmann::json& j) {
  EnergyHistogram h;
  try {
    h.edges = j.at("edges").get<std::vector<double>>();
    h.counts = j.at("counts").get<std::vector<std::size_t>>();
    h.reference = detail::json_optional<double>(j, "reference");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what(), "/");
  }
  if (h.edges.size() != h.counts.size() + 1) throw ParseError("edges must have one more entry than counts", "/edges");
  return h;
}

inline nlohmann::json to_json(const AblationReport& report) {
  auto variants = nlohmann::json::array();
  for (const auto& v : report.variants)
    variants.push_back({{"label", v.label}, {"mode", to_json(v.mode)}, {"summary", to_json(v.summary)}});
  return {{"variants", std::move(variants)}};
}

}  // namespace oim
