// oim: command-line front end for the oscillator Ising machine simulator.
//
//   oim solve   --input P --format {gset|ising-json} [dynamics flags] --out P
//   oim gen     --spins N --topology {complete|torus:R:C[:diag]} --seed N --out P
//   oim oracle  {brute|sa} --input P [--iters --t0 --t1 --moves-per-temp --seed]
//   oim bench   --suite DIR --catalog P --runs N [dynamics flags] --out P
//   oim convert --input P --from FMT --to FMT --out P
//
// Exit codes: 0 ok, 2 usage, 3 input parse error, 4 numerical divergence,
// 5 capacity refusal.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "oim/bench.hpp"
#include "oim/defaults.hpp"
#include "oim/dynamics.hpp"
#include "oim/io.hpp"
#include "oim/ising.hpp"
#include "oim/oracles.hpp"
#include "oim/params_io.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kParse = 3, kDivergence = 4, kCapacity = 5 };

struct UsageError : oim::Error {
  using oim::Error::Error;
};

struct LoadedProblem {
  oim::IsingProblem problem;
  std::optional<double> total_weight;
};

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

LoadedProblem load_problem(const std::string& path, const std::string& format) {
  const std::string text = oim::read_file(path);
  try {
    if (format == "gset") {
      auto graph = oim::parse_gset(text, stem_of(path));
      return {oim::maxcut_to_ising(graph), static_cast<double>(graph.total_weight())};
    }
    auto problem = oim::read_ising_json(text);
    if (problem.name().empty()) problem.set_name(stem_of(path));
    return {std::move(problem), std::nullopt};
  } catch (const oim::ParseError& e) {
    throw oim::ParseError(e.what(), path);
  }
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << content;
}

int thread_count(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("OIM_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("OIM_THREADS must be a positive integer");
  }
  return oim::default_parallelism();
}

// Dynamics flags shared by solve and bench. Defaults come from DynamicsParams{}.
struct DynamicsFlags {
  oim::DynamicsParams params;
  std::string ks_ramp = "full";
  bool no_sync = false;
  int runs = oim::defaults::kRuns;
  std::uint64_t seed = 0;
  int threads = 0;

  void add_to(CLI::App& app) {
    app.add_option("--runs", runs, "Independent runs per problem")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--cycles", params.cycles, "Simulated duration in oscillation cycles")->capture_default_str();
    app.add_option("--steps-per-cycle", params.steps_per_cycle, "Integration steps per cycle")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--k", params.K, "Coupling gain K")->capture_default_str();
    app.add_option("--ks", params.ks.level, "SYNC strength (final level of a ramp)")->capture_default_str();
    app.add_option("--ks-ramp", ks_ramp, "SYNC schedule: none | full (0 -> level over the run) | linear:T0:T1")
        ->capture_default_str();
    app.add_option("--noise", params.noise_amp, "Phase noise amplitude, rad per sqrt(cycle)")->capture_default_str();
    app.add_option("--variability", params.variability,
                   "Std. dev. of the fractional frequency spread (0.05 = 5%)")
        ->capture_default_str();
    app.add_flag("--no-sync", no_sync, "Disable SYNC (ablation)");
    app.add_flag("--normalize", params.normalize_by_degree, "Divide K by the maximum degree");
    app.add_flag("--polish", params.polish, "Greedy single-flip descent after rounding");
    app.add_option("--seed", seed, "Seed of run 0; run r uses seed + r")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (default: OIM_THREADS or all cores)");
  }

  oim::DynamicsParams resolve() const {
    oim::DynamicsParams p = params;
    const double level = p.ks.level;
    if (ks_ramp == "none") {
      p.ks = oim::KsSchedule::constant(level);
    } else if (ks_ramp == "full") {
      p.ks = oim::KsSchedule::ramp(0.0, p.cycles, level);
    } else if (ks_ramp.rfind("linear:", 0) == 0) {
      const auto rest = ks_ramp.substr(7);
      const auto colon = rest.find(':');
      if (colon == std::string::npos) throw UsageError("--ks-ramp expects linear:T0:T1");
      try {
        std::size_t used0 = 0, used1 = 0;
        const double t0 = std::stod(rest.substr(0, colon), &used0);
        const double t1 = std::stod(rest.substr(colon + 1), &used1);
        if (used0 != colon || used1 != rest.size() - colon - 1) throw std::invalid_argument("trailing");
        p.ks = oim::KsSchedule::ramp(t0, t1, level);
      } catch (const std::exception&) {
        throw UsageError("--ks-ramp expects linear:T0:T1 with numeric T0, T1");
      }
    } else {
      throw UsageError("unknown --ks-ramp '" + ks_ramp + "'");
    }
    p.sync_enabled = !no_sync;
    try {
      p.validate();
    } catch (const oim::SpecError& e) {
      throw UsageError(e.what());
    }
    return p;
  }
};

nlohmann::json metadata(const std::string& command, nlohmann::json extra) {
  nlohmann::json m{{"tool", "oim"}, {"command", command}, {"defaults_version", oim::defaults::kDefaultsVersion}};
  for (auto& [k, v] : extra.items()) m[k] = v;
  return m;
}

// JSON: one document with metadata and summary. CSV: the summary table plus a
// sidecar PATH.meta.json holding the metadata.
void write_summary(const std::string& out, const std::string& format, const nlohmann::json& meta,
                   const oim::RunSummary& summary) {
  if (format == "json") {
    nlohmann::json doc{{"metadata", meta}, {"summary", oim::to_json(summary)}};
    write_output(out, doc.dump(2) + "\n");
    return;
  }
  write_output(out, oim::summary_to_csv(summary));
  if (!out.empty() && out != "-") {
    write_output(out + ".meta.json", meta.dump(2) + "\n");
    write_output(out + ".runs.csv", oim::runs_to_csv(summary));
  }
}

int cmd_solve(const std::string& input, const std::string& format, const DynamicsFlags& flags, const std::string& out,
              const std::string& out_format, const std::string& trace) {
  const auto params = flags.resolve();
  const int threads = thread_count(flags.threads);
  auto loaded = load_problem(input, format);
  auto problem = std::make_shared<const oim::IsingProblem>(std::move(loaded.problem));

  oim::BenchmarkSpec spec;
  spec.problems.push_back({problem->name(), problem, loaded.total_weight, std::nullopt});
  spec.params = params;
  spec.runs = flags.runs;
  spec.seed_base = flags.seed;
  const auto summary = oim::run_benchmark(spec, threads);

  const auto meta = metadata("solve", {{"input", input},
                                       {"format", format},
                                       {"params", oim::to_json(params)},
                                       {"runs", flags.runs},
                                       {"seed", flags.seed},
                                       {"seeds", {{"first", flags.seed}, {"last", flags.seed + flags.runs - 1}}}});
  write_summary(out, out_format, meta, summary);

  if (!trace.empty()) {
    const auto& best = summary.problems.front();
    std::uint64_t seed = best.records.front().seed;
    for (const auto& r : best.records)
      if (r.H == best.best_H) {
        seed = r.seed;
        break;
      }
    auto traced = params;
    traced.trace_points = oim::defaults::kMaxTracePoints;
    const auto run = oim::simulate(*problem, traced, seed, loaded.total_weight);
    std::string csv = "seed,time,lyapunov,H\n";
    for (const auto& p : run.trajectory)
      csv += std::to_string(seed) + "," + oim::detail::format_number(p.time) + "," +
             oim::detail::format_number(p.lyapunov) + "," + oim::detail::format_number(p.hamiltonian) + "\n";
    write_output(trace, csv);
  }
  return kOk;
}

oim::TopologySpec parse_topology(const std::string& text, std::size_t spins) {
  if (text == "complete") return oim::topology::Complete{};
  if (text.rfind("torus:", 0) == 0) {
    std::vector<std::string> parts;
    std::size_t pos = 6;
    while (true) {
      auto colon = text.find(':', pos);
      parts.push_back(text.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos));
      if (colon == std::string::npos) break;
      pos = colon + 1;
    }
    if (parts.size() < 2 || parts.size() > 3 || (parts.size() == 3 && parts[2] != "diag"))
      throw UsageError("--topology expects torus:R:C or torus:R:C:diag");
    try {
      const auto rows = std::stoul(parts[0]);
      const auto cols = std::stoul(parts[1]);
      if (rows * cols != spins)
        throw UsageError("torus " + parts[0] + "x" + parts[1] + " does not have " + std::to_string(spins) + " cells");
      return oim::topology::TorusGrid{rows, cols, parts.size() == 3};
    } catch (const std::logic_error&) {
      throw UsageError("--topology torus dimensions must be integers");
    }
  }
  throw UsageError("unknown --topology '" + text + "'");
}

int cmd_gen(std::size_t spins, const std::string& topology, std::uint64_t seed, const std::string& out,
            const std::string& format) {
  const auto problem = oim::random_ising(spins, parse_topology(topology, spins), seed);
  if (format == "gset")
    write_output(out, oim::write_gset(oim::ising_to_maxcut(problem)));
  else
    write_output(out, oim::write_ising_json(problem));
  return kOk;
}

int cmd_oracle(const std::string& method, const std::string& input, const std::string& format,
               oim::SaParams sa, const std::string& out) {
  auto loaded = load_problem(input, format);
  nlohmann::json doc{{"metadata", metadata("oracle", {{"method", method}, {"input", input}, {"format", format}})}};
  auto add_cut = [&](double H) {
    if (loaded.total_weight) doc["cut"] = oim::cut_from_hamiltonian(H, *loaded.total_weight);
  };
  if (method == "brute") {
    const auto r = oim::brute_force(loaded.problem);
    doc["min_H"] = r.min_H;
    doc["minimizer_count"] = r.minimizer_count;
    doc["truncated"] = r.truncated;
    auto list = nlohmann::json::array();
    for (const auto& s : r.minimizers) list.push_back(s.to_vector());
    doc["minimizers"] = std::move(list);
    add_cut(r.min_H);
  } else {
    try {
      sa.validate();
    } catch (const oim::SpecError& e) {
      throw UsageError(e.what());
    }
    const auto start = std::chrono::steady_clock::now();
    const auto r = oim::simulated_annealing(loaded.problem, sa);
    doc["metadata"]["sa"] = oim::to_json(sa);
    doc["best_H"] = r.best_H;
    doc["best_spins"] = r.best_spins.to_vector();
    doc["secs"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    add_cut(r.best_H);
  }
  write_output(out, doc.dump(2) + "\n");
  return kOk;
}

int cmd_bench(const std::string& suite, const std::string& catalog_path, const DynamicsFlags& flags,
              const std::string& out, const std::string& out_format) {
  const auto params = flags.resolve();
  const int threads = thread_count(flags.threads);
  oim::BestKnownCatalog catalog = catalog_path.empty() ? oim::builtin_catalog()
                                                       : oim::load_catalog(oim::read_file(catalog_path));
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(suite, ec))
    if (entry.is_regular_file()) files.push_back(entry.path());
  if (ec) throw oim::ParseError("cannot list suite directory", suite);
  if (files.empty()) throw oim::ParseError("suite directory has no instance files", suite);
  std::sort(files.begin(), files.end());

  oim::BenchmarkSpec spec;
  spec.params = params;
  spec.runs = flags.runs;
  spec.seed_base = flags.seed;
  nlohmann::json instances = nlohmann::json::array();
  for (const auto& f : files) {
    auto graph = oim::parse_gset(oim::read_file(f.string()), f.stem().string());
    const double W = static_cast<double>(graph.total_weight());
    std::optional<double> reference;
    nlohmann::json info{{"name", graph.name()}, {"file", f.filename().string()}};
    if (auto entry = catalog.find(graph.name())) {
      reference = oim::reference_from_cut(static_cast<double>(entry->best_cut), W);
      info["best_known_cut"] = entry->best_cut;
      info["best_known_source"] = entry->source;
    }
    instances.push_back(info);
    auto problem = std::make_shared<const oim::IsingProblem>(oim::maxcut_to_ising(graph));
    spec.problems.push_back({graph.name(), problem, W, reference});
  }
  const auto summary = oim::run_benchmark(spec, threads);
  const auto meta = metadata("bench", {{"suite", suite},
                                       {"catalog", catalog_path.empty() ? "builtin" : catalog_path},
                                       {"instances", instances},
                                       {"params", oim::to_json(params)},
                                       {"runs", flags.runs},
                                       {"seed", flags.seed}});
  write_summary(out, out_format, meta, summary);
  return kOk;
}

int cmd_convert(const std::string& input, const std::string& from, const std::string& to, const std::string& out) {
  auto loaded = load_problem(input, from);
  if (to == "gset")
    write_output(out, oim::write_gset(oim::ising_to_maxcut(loaded.problem)));
  else
    write_output(out, oim::write_ising_json(loaded.problem));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oscillator Ising machine simulator"};
  app.require_subcommand(1);
  const std::vector<std::string> formats{"gset", "ising-json"};
  const std::vector<std::string> out_formats{"csv", "json"};

  std::string input, format = "gset", out, out_format = "json", trace;

  auto* solve = app.add_subcommand("solve", "Simulate the machine on one problem");
  DynamicsFlags solve_flags;
  solve->add_option("--input", input, "Problem file")->required();
  solve->add_option("--format", format, "Input format")->check(CLI::IsMember(formats))->capture_default_str();
  solve_flags.add_to(*solve);
  solve->add_option("--out", out, "Result file (default: stdout)");
  solve->add_option("--out-format", out_format, "Result format")->check(CLI::IsMember(out_formats))->capture_default_str();
  solve->add_option("--trace", trace, "Write the (time, Lyapunov, H) trace of the best run as CSV");

  auto* gen = app.add_subcommand("gen", "Generate a random Ising problem");
  std::size_t spins = 0;
  std::string topology = "complete", gen_format = "ising-json";
  std::uint64_t gen_seed = 0;
  gen->add_option("--spins", spins, "Number of spins")->required()->check(CLI::PositiveNumber);
  gen->add_option("--topology", topology, "complete | torus:R:C[:diag]")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", out, "Output file (default: stdout)");
  gen->add_option("--format", gen_format, "Output format")->check(CLI::IsMember(formats))->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "Reference solvers");
  std::string method;
  oim::SaParams sa;
  oracle->add_option("method", method, "brute | sa")->required()->check(CLI::IsMember({"brute", "sa"}));
  oracle->add_option("--input", input, "Problem file")->required();
  oracle->add_option("--format", format, "Input format")->check(CLI::IsMember(formats))->capture_default_str();
  oracle->add_option("--iters", sa.iterations, "SA spin-flip attempts")->capture_default_str();
  oracle->add_option("--t0", sa.T_initial, "SA initial temperature (0: max absolute row sum)")->capture_default_str();
  oracle->add_option("--t1", sa.T_final, "SA final temperature")->capture_default_str();
  oracle->add_option("--moves-per-temp", sa.moves_per_temp, "SA moves per temperature (0: n)")->capture_default_str();
  oracle->add_option("--seed", sa.seed, "SA seed")->capture_default_str();
  oracle->add_option("--out", out, "Output file (default: stdout)");

  auto* bench = app.add_subcommand("bench", "Run a directory of G-set instances");
  DynamicsFlags bench_flags;
  std::string suite, catalog;
  bench->add_option("--suite", suite, "Directory of G-set files")->required();
  bench->add_option("--catalog", catalog, "Best-known CSV (default: built-in table)");
  bench_flags.add_to(*bench);
  bench->add_option("--out", out, "Result file (default: stdout)");
  bench->add_option("--out-format", out_format, "Result format")->check(CLI::IsMember(out_formats))->capture_default_str();

  auto* convert = app.add_subcommand("convert", "Convert between problem formats");
  std::string from, to;
  convert->add_option("--input", input, "Problem file")->required();
  convert->add_option("--from", from, "Input format")->required()->check(CLI::IsMember(formats));
  convert->add_option("--to", to, "Output format")->required()->check(CLI::IsMember(formats));
  convert->add_option("--out", out, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*solve) return cmd_solve(input, format, solve_flags, out, out_format, trace);
    if (*gen) return cmd_gen(spins, topology, gen_seed, out, gen_format);
    if (*oracle) return cmd_oracle(method, input, format, sa, out);
    if (*bench) return cmd_bench(suite, catalog, bench_flags, out, out_format);
    if (*convert) return cmd_convert(input, from, to, out);
  } catch (const UsageError& e) {
    std::cerr << "oim: " << e.what() << "\n";
    return kUsage;
  } catch (const oim::SpecError& e) {
    std::cerr << "oim: " << e.what() << "\n";
    return kUsage;
  } catch (const oim::ParseError& e) {
    std::cerr << "oim: parse error: " << e.what() << "\n";
    return kParse;
  } catch (const oim::InvalidProblem& e) {
    std::cerr << "oim: invalid input: " << e.what() << "\n";
    return kParse;
  } catch (const oim::DivergenceError& e) {
    std::cerr << "oim: numerical divergence: " << e.what() << "\n";
    return kDivergence;
  } catch (const oim::CapacityError& e) {
    std::cerr << "oim: " << e.what() << "\n";
    return kCapacity;
  } catch (const std::exception& e) {
    std::cerr << "oim: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}
