// Acceptance run: one PASS/FAIL/BLOCKED line per criterion.
//
// Criteria that need the published G-set files read them from $OIM_GSET_DIR and
// report BLOCKED when the files are not there. Exit status is 0 when everything
// passed, 1 on any failure, and 77 (ctest skip) when the only non-passing
// criteria are blocked. --surrogates additionally runs the G-set protocol on
// the generated look-alike instances and prints the numbers as INFO lines.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oim/bench.hpp"
#include "oim/instances.hpp"
#include "oim/io.hpp"
#include "oim/oracles.hpp"
#include "oracle_util.hpp"

namespace fs = std::filesystem;
using namespace oim;

namespace {

enum class Status { kPass, kFail, kBlocked };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome fail(std::string d) { return {Status::kFail, std::move(d)}; }
Outcome blocked(std::string d) { return {Status::kBlocked, std::move(d)}; }
Outcome check(bool ok, std::string d) { return {ok ? Status::kPass : Status::kFail, std::move(d)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int digits = 3) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

void info(const std::string& text) { std::cout << "       INFO " << text << "\n"; }

// ---------------------------------------------------------------------------
// G-set files

std::optional<fs::path> gset_dir() {
  const char* env = std::getenv("OIM_GSET_DIR");
  if (!env || !*env || !fs::is_directory(env)) return std::nullopt;
  return fs::path(env);
}

std::optional<WeightedGraph> load_gset(const std::string& name) {
  const auto dir = gset_dir();
  if (!dir) return std::nullopt;
  std::string lower = name;
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (const auto& candidate : {name, name + ".txt", lower, lower + ".txt"}) {
    const auto p = *dir / candidate;
    if (fs::is_regular_file(p)) return parse_gset(read_file(p.string()), name);
  }
  return std::nullopt;
}

std::string missing(const std::string& name) {
  return name + " not found (set OIM_GSET_DIR to a directory holding the published G-set files)";
}

BenchProblem bench_problem(const WeightedGraph& g) {
  return {g.name(), std::make_shared<const IsingProblem>(maxcut_to_ising(g)), static_cast<double>(g.total_weight()),
          std::nullopt};
}

double best_cut(const ProblemSummary& s) { return *s.best_cut; }

std::vector<double> cuts(const ProblemSummary& s) {
  std::vector<double> out;
  for (const auto& r : s.records) out.push_back(*r.cut);
  return out;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

// Mean over consecutive groups of the best cut in each group.
double mean_best_of(const ProblemSummary& s, int group) {
  std::vector<double> best;
  const auto c = cuts(s);
  for (std::size_t start = 0; start + group <= c.size(); start += group)
    best.push_back(*std::max_element(c.begin() + start, c.begin() + start + group));
  return mean(best);
}

int parallelism() { return default_parallelism(); }

// ---------------------------------------------------------------------------
// Criteria 1-4, 8: property suites on generated problems

IsingProblem pm1_problem_with_fields(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution sign(0.5);
  std::uniform_real_distribution<double> field(-1.0, 1.0);
  std::vector<Coupling> c;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) c.push_back({i, j, sign(rng) ? 1.0 : -1.0});
  std::vector<double> h(n);
  for (auto& x : h) x = field(rng);
  return IsingProblem(n, std::move(c), std::move(h));
}

Outcome gradient_consistency() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);
  DynamicsParams params;
  params.ks = KsSchedule::constant(defaults::kSyncLevel);
  const double h = 1e-5;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = pm1_problem_with_fields(50, seed);
    for (int k = 0; k < 100; ++k) {
      PhaseState s;
      for (int i = 0; i < 50; ++i) s.phases.push_back(phase(rng));
      const auto d = drift(p, s, params, zero_detuning(50));
      double err2 = 0.0, norm2 = 0.0;
      for (int i = 0; i < 50; ++i) {
        auto plus = s, minus = s;
        plus.phases[i] += h;
        minus.phases[i] -= h;
        const double g = (lyapunov(p, plus, params) - lyapunov(p, minus, params)) / (2 * h);
        err2 += (d[i] + g) * (d[i] + g);
        norm2 += g * g;
      }
      worst = std::max(worst, std::sqrt(err2 / norm2));
    }
  }
  const double secs = seconds_since(t0);
  return check(worst < 1e-6 && secs < 10.0,
               "max relative error " + fmt(worst) + " over 2000 states (< 1e-6), " + fmt(secs) + " s (< 10 s)");
}

Outcome binary_identity() {
  double worst = 0.0;
  std::size_t states = 0;
  for (std::size_t n = 1; n <= 10; ++n) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto p = testing::random_problem(n, 0.6, seed != 0, 10 * n + seed);
      DynamicsParams params;
      params.K = 0.5 + seed;
      params.ks = KsSchedule::constant(0.3 + 0.7 * seed);
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
        const auto s = testing::spins_from_mask(n, m);
        PhaseState st;
        for (int v : s) st.phases.push_back(v == 1 ? 0.0 : std::numbers::pi);
        const double expected = params.K * testing::naive_hamiltonian(p, s) - n * params.ks.level / 2.0;
        worst = std::max(worst, std::abs(lyapunov(p, st, params) - expected));
        ++states;
      }
    }
  }
  return check(worst <= 1e-12, "max |E - (K H - n Ks/2)| = " + fmt(worst) + " over " + std::to_string(states) +
                                   " binary states, n = 1..10");
}

Outcome lyapunov_descent() {
  double worst = -INFINITY;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = testing::random_problem(100, 0.1, true, 500 + seed);
    DynamicsParams params;
    params.ks = KsSchedule::constant(defaults::kSyncLevel);
    params.noise_amp = 0.0;
    params.steps_per_cycle = 200;
    PhaseModel model(p, params, zero_detuning(p.n()));
    auto state = random_phases(p.n(), seed);
    Rng rng(seed);
    double E = model.lyapunov(state.phases, 0.0);
    for (int k = 0; k < 200 * 100; ++k) {
      if (!model.step(state, rng)) return fail("non-finite state at step " + std::to_string(k));
      const double next = model.lyapunov(state.phases, state.time);
      worst = std::max(worst, (next - E) / (1.0 + std::abs(E)));
      E = next;
    }
  }
  return check(worst <= 1e-8, "largest relative increase per step " + fmt(worst) + " (<= 1e-8), 10 x 20000 steps");
}

Outcome small_instance_optimality() {
  const auto t0 = std::chrono::steady_clock::now();
  int optimal = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto p = std::make_shared<const IsingProblem>(random_ising(10, topology::Complete{}, 900 + seed));
    const double ref = brute_force(*p).min_H;
    BenchmarkSpec spec{{{"p", p, std::nullopt, ref}}, DynamicsParams{}, 10, 0, {}};
    const auto s = run_benchmark(spec, parallelism());
    optimal += *s.problems[0].success > 0;
  }
  const double secs = seconds_since(t0);
  return check(optimal >= 45 && secs < 120.0, std::to_string(optimal) + "/50 instances optimal with best-of-10 (>= 45), " +
                                                  fmt(secs) + " s (< 120 s)");
}

Outcome random_baseline() {
  const auto p = random_ising(240, topology::Complete{}, 240);
  const auto e = random_solution_energies(p, 1000, 1);
  const double m = mean(e);
  double sq = 0.0;
  for (double x : e) sq += (x - m) * (x - m);
  const double sd = std::sqrt(sq / (e.size() - 1));
  const double bound = 3.0 * sd / std::sqrt(1000.0);
  return check(std::abs(m) <= bound, "mean H " + fmt(m) + ", bound 3 sd/sqrt(1000) = " + fmt(bound));
}

// ---------------------------------------------------------------------------
// Criteria 5-7, 9: benchmark protocol on a graph (real or surrogate)

struct Targets {
  double g11 = 552, g11_stretch = 564, g1 = 11500, g1_stretch = 11624, sa_g11 = 553;
};

struct QualityResult {
  bool ok;
  std::string detail;
};

QualityResult quality(const WeightedGraph& g, double target, double stretch, bool check_time) {
  BenchmarkSpec spec{{bench_problem(g)}, DynamicsParams{}, 20, 0, {}};
  const auto s = run_benchmark(spec, parallelism()).problems[0];
  double slowest = 0.0;
  for (const auto& r : s.records) slowest = std::max(slowest, r.secs);
  const bool ok = best_cut(s) >= target && (!check_time || slowest <= 60.0);
  std::string d = g.name() + " best-of-20 cut " + fmt(best_cut(s), 6) + " (>= " + fmt(target, 6) + "), mean " +
                  fmt(*s.mean_cut, 6) + ", slowest run " + fmt(slowest) + " s";
  if (check_time) d += " (<= 60 s)";
  d += ", stretch " + fmt(stretch, 6) + (best_cut(s) >= stretch ? " reached" : " not reached");
  return {ok, d};
}

QualityResult no_sync_gap(const WeightedGraph& g) {
  const auto report = ablation_compare(bench_problem(g), DynamicsParams{}, 20, 0, parallelism(),
                                       {BenchMode::standard(), BenchMode::no_sync()});
  const auto& on = report.at("standard").summary;
  const auto& off = report.at("no_sync").summary;
  const auto d = paired_difference(on, off);
  const double gap = d.mean_difference, se = d.standard_error;
  return {gap > 0.0 && gap > 5.0 * se, g.name() + " mean cut " + fmt(*on.mean_cut, 6) + " with SYNC vs " +
                                           fmt(*off.mean_cut, 6) + " without, gap " + fmt(gap) + " = " +
                                           fmt(se > 0 ? gap / se : INFINITY) + " paired SE (> 5)"};
}

QualityResult variability(const WeightedGraph& g) {
  const int groups = 3;
  const auto report = ablation_compare(bench_problem(g), DynamicsParams{}, 20 * groups, 0, parallelism(),
                                       {BenchMode::standard(), BenchMode::with_variability(0.05)});
  const double nominal = mean_best_of(report.at("standard").summary, 20);
  const double spread = mean_best_of(report.at("variability_5pct").summary, 20);
  return {spread >= 0.98 * nominal, g.name() + " mean best-of-20 cut " + fmt(spread, 6) + " at 5% spread vs " +
                                        fmt(nominal, 6) + " nominal, ratio " + fmt(spread / nominal, 4) +
                                        " (>= 0.98, " + std::to_string(groups) + " groups)"};
}

QualityResult sa_sanity(const WeightedGraph& g, double target) {
  const auto p = maxcut_to_ising(g);
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = simulated_annealing(p, {.iterations = 10'000'000, .seed = 1});
  const double cut = cut_from_hamiltonian(r.best_H, static_cast<double>(g.total_weight()));
  return {cut >= target, g.name() + " SA (1e7 flips) cut " + fmt(cut, 6) + " (>= " + fmt(target, 6) + "), " +
                             fmt(seconds_since(t0)) + " s"};
}

Outcome gset_quality(const Targets& t) {
  const auto g11 = load_gset("G11");
  const auto g1 = load_gset("G1");
  if (!g11 || !g1) return blocked(missing(!g11 ? "G11" : "G1"));
  const auto a = quality(*g11, t.g11, t.g11_stretch, true);
  const auto b = quality(*g1, t.g1, t.g1_stretch, false);
  return check(a.ok && b.ok, a.detail + "; " + b.detail);
}

Outcome gset_no_sync() {
  const auto g = load_gset("G11");
  if (!g) return blocked(missing("G11"));
  const auto r = no_sync_gap(*g);
  return check(r.ok, r.detail);
}

Outcome gset_variability() {
  const auto g = load_gset("G11");
  if (!g) return blocked(missing("G11"));
  const auto r = variability(*g);
  return check(r.ok, r.detail);
}

Outcome gset_sa(const Targets& t) {
  const auto g = load_gset("G11");
  if (!g) return blocked(missing("G11"));
  const auto r = sa_sanity(*g, t.sa_g11);
  return check(r.ok, r.detail);
}

bool round_trips(const WeightedGraph& g) {
  const auto text = write_gset(g);
  const auto back = parse_gset(text, g.name());
  return back == g && write_gset(back) == text;
}

Outcome gset_io() {
  const auto dir = gset_dir();
  if (!dir) return blocked("OIM_GSET_DIR is not set");
  std::size_t files = 0;
  std::vector<std::string> bad;
  for (const auto& entry : fs::directory_iterator(*dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().stem().string();
    if (name.empty() || (name[0] != 'G' && name[0] != 'g')) continue;
    ++files;
    try {
      if (!round_trips(parse_gset(read_file(entry.path().string()), name))) bad.push_back(name);
    } catch (const Error& e) {
      bad.push_back(name + " (" + e.what() + ")");
    }
  }
  const auto g1 = load_gset("G1");
  if (!g1) return blocked(missing("G1"));
  std::string detail = std::to_string(files - bad.size()) + "/" + std::to_string(files) +
                       " files round-trip exactly; G1 has " + std::to_string(g1->n_vertices()) + " vertices and " +
                       std::to_string(g1->edges().size()) + " edges (800, 19176)";
  for (const auto& b : bad) detail += "; failed: " + b;
  return check(bad.empty() && g1->n_vertices() == 800 && g1->edges().size() == 19176, detail);
}

// ---------------------------------------------------------------------------
// Criterion 11: CLI determinism

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OIM_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void strip_timing(nlohmann::json& j) {
  if (j.is_object()) {
    for (const char* key : {"secs", "total_secs", "secs_per_run"}) j.erase(key);
    for (auto& [k, v] : j.items()) strip_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) strip_timing(v);
  }
}

// Drops the named CSV columns from every row.
std::string strip_columns(const std::string& csv, const std::vector<std::string>& names) {
  std::istringstream in(csv);
  std::string line, out;
  std::vector<bool> keep;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (keep.empty())
      for (const auto& c : cells) keep.push_back(std::find(names.begin(), names.end(), c) == names.end());
    for (std::size_t k = 0; k < cells.size(); ++k)
      if (k >= keep.size() || keep[k]) out += cells[k] + ",";
    out += "\n";
  }
  return out;
}

std::string normalized(const fs::path& p) {
  const auto text = slurp(p);
  const auto ext = p.extension().string();
  if (ext == ".json") {
    auto j = nlohmann::json::parse(text);
    strip_timing(j);
    return j.dump();
  }
  if (ext == ".csv") return strip_columns(text, {"secs", "secs_per_run"});
  return text;
}

Outcome cli_determinism() {
  const auto root = fs::temp_directory_path() / "oim_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root / "suite");
  {
    std::ofstream(root / "suite" / "G1") << "4 5\n1 2 1\n2 3 1\n3 4 1\n1 4 1\n1 3 -1\n";
    std::ofstream(root / "suite" / "tri") << "3 3\n1 2 1\n1 3 1\n2 3 1\n";
  }
  const std::string r = root.string() + "/";
  if (run_cli("gen --spins 64 --topology torus:8:8 --seed 3 --out " + r + "gen.json") != 0)
    return fail("gen failed");

  struct Case {
    std::string label, args;
    std::vector<std::string> outputs;
  };
  const std::vector<Case> cases{
      {"gen json", "gen --spins 30 --seed 9 --out {}a.json", {"a.json"}},
      {"gen gset", "gen --spins 64 --topology torus:8:8:diag --seed 9 --format gset --out {}a.txt", {"a.txt"}},
      {"solve json",
       "solve --input " + r + "gen.json --format ising-json --runs 6 --cycles 50 --variability 0.02 --seed 4 --trace {}t.csv --out {}s.json",
       {"s.json", "t.csv"}},
      {"solve csv", "solve --input " + r + "gen.json --format ising-json --runs 4 --cycles 30 --no-sync --out-format csv --out {}s.csv",
       {"s.csv", "s.csv.meta.json", "s.csv.runs.csv"}},
      {"oracle sa", "oracle sa --input " + r + "gen.json --format ising-json --iters 20000 --seed 2 --out {}o.json", {"o.json"}},
      {"oracle brute", "oracle brute --input " + r + "suite/G1 --out {}b.json", {"b.json"}},
      {"bench", "bench --suite " + r + "suite --runs 3 --cycles 20 --polish --out {}bench.json", {"bench.json"}},
      {"convert", "convert --input " + r + "gen.json --from ising-json --to gset --out {}c.txt", {"c.txt"}},
  };

  std::vector<std::string> diffs;
  int compared = 0;
  for (const auto& c : cases) {
    std::vector<std::string> results[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto dir = root / ("rep" + std::to_string(rep));
      fs::create_directories(dir);
      std::string args = c.args;
      for (std::size_t pos; (pos = args.find("{}")) != std::string::npos;) args.replace(pos, 2, dir.string() + "/");
      if (run_cli(args) != 0) return fail(c.label + " exited with an error");
      for (const auto& o : c.outputs) results[rep].push_back(normalized(dir / o));
    }
    for (std::size_t k = 0; k < c.outputs.size(); ++k, ++compared)
      if (results[0][k] != results[1][k]) diffs.push_back(c.label + ":" + c.outputs[k]);
  }
  fs::remove_all(root);
  std::string detail = std::to_string(compared - diffs.size()) + "/" + std::to_string(compared) +
                       " result files identical across repeated invocations (timing fields excluded)";
  for (const auto& d : diffs) detail += "; differs: " + d;
  return check(diffs.empty(), detail);
}

// ---------------------------------------------------------------------------

void surrogate_report(const Targets& t) {
  std::cout << "surrogate instances (generated look-alikes, not the published files):\n";
  const auto g11 = g11_like();
  const auto g1 = g1_like();
  info(quality(g11, t.g11, t.g11_stretch, true).detail);
  info(quality(g1, t.g1, t.g1_stretch, false).detail);
  info(no_sync_gap(g11).detail);
  info(variability(g11).detail);
  info(sa_sanity(g11, t.sa_g11).detail);
  info(sa_sanity(g1, t.g1).detail);
  info(std::string("surrogate G-set round trip ") + (round_trips(g11) && round_trips(g1) ? "exact" : "FAILED"));
}

}  // namespace

int main(int argc, char** argv) {
  bool surrogates = false;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--surrogates") == 0) {
      surrogates = true;
    } else {
      std::cerr << "usage: oim_acceptance [--surrogates]\n";
      return 2;
    }
  }

  const Targets targets;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient consistency", gradient_consistency},
      {"binary-phase identity", binary_identity},
      {"Lyapunov descent", lyapunov_descent},
      {"small-instance optimality", small_instance_optimality},
      {"G-set cut targets", [&] { return gset_quality(targets); }},
      {"no-SYNC ablation", gset_no_sync},
      {"variability robustness", gset_variability},
      {"random-solution baseline", random_baseline},
      {"SA oracle sanity", [&] { return gset_sa(targets); }},
      {"G-set I/O round trip", gset_io},
      {"CLI determinism", cli_determinism},
  };

  int failed = 0, blocked_count = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "BLOCKED";
    std::cout << "[" << tag << "] " << (k + 1) << ". " << criteria[k].first << ": " << o.detail << std::endl;
    failed += o.status == Status::kFail;
    blocked_count += o.status == Status::kBlocked;
  }
  if (surrogates) surrogate_report(targets);

  std::cout << criteria.size() - failed - blocked_count << " passed, " << failed << " failed, " << blocked_count
            << " blocked\n";
  if (failed) return 1;
  return blocked_count ? 77 : 0;
}
