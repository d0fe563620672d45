#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "sketchim/cli.hpp"
#include "sketchim/generators.hpp"
#include "sketchim/graph.hpp"
#include "sketchim/hashing.hpp"
#include "sketchim/oracle.hpp"
#include "sketchim/seeder.hpp"

namespace sketchim::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

LoadedGraph load(const GraphSource& source) {
  ParseOptions options;
  options.directed = source.directed;
  return load_graph(source.path, options, parse_weight_model(source.weights));
}

// Non-finite values have no JSON spelling; thresholds are echoed as "inf".
ojson number_or_inf(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : "-inf";
}

double read_threshold(const nlohmann::json& value) {
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    throw ValidationError("threshold must be a number or \"inf\", got \"" + s + "\"");
  }
  if (!value.is_number()) throw ValidationError("threshold must be a number or \"inf\"");
  return value.get<double>();
}

template <typename Fn>
void write_output(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    fallback.flush();
    if (!fallback) throw IoError("failed writing to standard output");
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  write(file);
  file.flush();
  if (!file) throw IoError("failed writing '" + path + "'");
}

std::string mode_name(SyncMode mode) { return mode == SyncMode::strict ? "strict" : "relaxed"; }

std::vector<vertex_t> to_vertices(std::span<const std::int64_t> wanted,
                                  std::span<const std::int64_t> labels) {
  std::unordered_map<std::int64_t, vertex_t> index;
  index.reserve(labels.size());
  for (std::size_t v = 0; v < labels.size(); ++v) index.emplace(labels[v], static_cast<vertex_t>(v));
  std::vector<vertex_t> out;
  out.reserve(wanted.size());
  for (auto label : wanted) {
    auto it = index.find(label);
    if (it == index.end()) throw ValidationError(fmt::format("unknown vertex id {}", label));
    out.push_back(it->second);
  }
  return out;
}

long peak_rss_kb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return usage.ru_maxrss;
}

ojson render_select(const RunConfig& config, const LoadedGraph& loaded, const SeedResult& result) {
  const auto& labels = loaded.labels;
  ojson doc;
  doc["format_version"] = kFormatVersion;
  doc["config"] = {
      {"graph", config.graph.path},
      {"directed", config.graph.directed},
      {"weights", config.graph.weights},
      {"k", config.k},
      {"j", config.j},
      {"eps_l", number_or_inf(config.eps_l)},
      {"eps_g", number_or_inf(config.eps_g)},
      {"eps_c", config.eps_c},
      {"master_seed", config.master_seed},
      {"mode", mode_name(config.mode)},
  };
  doc["graph"] = {{"vertices", loaded.graph.num_vertices()}, {"edges", loaded.graph.num_edges()}};
  ojson seeds = ojson::array();
  for (auto s : result.seeds) seeds.push_back(labels[s]);
  doc["seeds"] = std::move(seeds);
  ojson steps = ojson::array();
  for (std::size_t i = 0; i < result.steps.size(); ++i) {
    const auto& rec = result.steps[i];
    steps.push_back({
        {"k", i + 1},
        {"vertex", labels[rec.vertex]},
        {"estimate", rec.estimate},
        {"delta", rec.delta},
        {"sigma", rec.sigma},
        {"err_l", number_or_inf(rec.err_l)},
        {"err_g", number_or_inf(rec.err_g)},
        {"rebuilt", rec.rebuilt},
    });
  }
  doc["steps"] = std::move(steps);
  doc["sigma_final"] = result.sigma_final;
  doc["rebuilds"] = result.rebuild_count();
  doc["simulate_passes"] = result.simulate_passes;
  return doc;
}

}  // namespace

std::vector<std::int64_t> read_seed_labels(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<std::int64_t> labels;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(0, std::string("seed file: ") + e.what());
    }
    if (!doc.contains("seeds") || !doc["seeds"].is_array()) {
      throw ParseError(0, "seed file: JSON document has no \"seeds\" array");
    }
    for (const auto& s : doc["seeds"]) {
      if (!s.is_number_integer()) throw ParseError(0, "seed file: non-integer seed id");
      labels.push_back(s.get<std::int64_t>());
    }
    return labels;
  }

  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string token;
    while (fields >> token) {
      std::int64_t value = 0;
      std::size_t used = 0;
      try {
        value = std::stoll(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size()) throw ParseError(lineno, "seed file: bad vertex id '" + token + "'");
      labels.push_back(value);
    }
  }
  return labels;
}

std::string select_json(const RunConfig& config, std::ostream& log) {
  config.validate();
  const LoadedGraph loaded = load(config.graph);
  const SimulationSet sims(config.j, config.master_seed);

  SeederOptions options;
  options.policy = config.policy();
  options.exec = {config.threads, config.mode};
  log << fmt::format("{:>5} {:>10} {:>12} {:>12} {:>12} {:>10} {:>10} {:>4}\n", "k", "vertex",
                     "estimate", "delta", "sigma", "err_l", "err_g", "rb");
  options.on_step = [&](std::size_t k, const StepRecord& rec) {
    log << fmt::format("{:>5} {:>10} {:>12.3f} {:>12.3f} {:>12.3f} {:>10.4f} {:>10.4f} {:>4}\n", k,
                       loaded.labels[rec.vertex], rec.estimate, rec.delta, rec.sigma, rec.err_l,
                       rec.err_g, rec.rebuilt ? "yes" : "");
  };
  if (config.trace) {
    options.diffusion_trace = [&](const DiffusionTrace& t) {
      log << fmt::format("  diffusion iter {:>3} live {:>9} {:.4f}s\n", t.iteration, t.live_count,
                         t.elapsed.count());
    };
  }

  const SeedResult result = select_seeds(loaded.graph, config.k, sims, options);
  return render_select(config, loaded, result).dump(2) + "\n";
}

int cmd_select(const RunConfig& config, std::ostream& out, std::ostream& log) {
  const std::string doc = select_json(config, log);
  write_output(config.output_path, out, [&](std::ostream& os) { os << doc; });
  return kOk;
}

int cmd_evaluate(const EvaluateConfig& config, std::ostream& out, std::ostream& log) {
  config.validate();
  const LoadedGraph loaded = load(config.graph);
  std::ifstream seeds_file(config.seeds_path);
  if (!seeds_file) throw IoError("cannot open seed file '" + config.seeds_path + "'");
  const auto labels = read_seed_labels(seeds_file);
  const auto seeds = to_vertices(labels, loaded.labels);

  OracleConfig oracle{config.rounds, config.rng_seed, {config.threads, SyncMode::strict}};
  std::vector<std::pair<std::size_t, InfluenceScore>> rows;
  if (config.curve) {
    for (std::size_t size = 1; size <= seeds.size(); ++size) {
      rows.emplace_back(size, oracle_influence(loaded.graph, std::span(seeds).first(size), oracle));
    }
  } else {
    rows.emplace_back(seeds.size(), oracle_influence(loaded.graph, seeds, oracle));
  }

  const auto& last = rows.back().second;
  if (config.output_path.empty()) {
    out << fmt::format("{:.4f} +/- {:.4f} (|S| = {}, R = {})\n", last.mean, last.std_error,
                       seeds.size(), last.rounds);
    return kOk;
  }
  write_output(config.output_path, out, [&](std::ostream& os) {
    write_oracle_csv_header(os);
    for (const auto& [size, score] : rows) write_oracle_csv_row(os, size, score);
  });
  log << fmt::format("{:.4f} +/- {:.4f} (|S| = {}, R = {})\n", last.mean, last.std_error,
                     seeds.size(), last.rounds);
  return kOk;
}

int cmd_bias_stats(const BiasConfig& config, std::ostream& out, std::ostream& log) {
  config.validate();
  const LoadedGraph loaded = load(config.graph);
  const SimulationSet sims(config.j, config.master_seed);
  const BiasReport report = bias_report(loaded.graph, sims, config.samples, config.bins);
  write_output(config.output_path, out, [&](std::ostream& os) { write_bias_csv(report, os); });
  log << fmt::format("draws {}  max |CDF(x) - x| = {:.6f}\n", report.draws, report.max_deviation);
  return kOk;
}

int cmd_bench(const BenchConfig& config, std::ostream& out, std::ostream& log) {
  std::ifstream sweep_file(config.sweep_path);
  if (!sweep_file) throw IoError("cannot open sweep file '" + config.sweep_path + "'");
  nlohmann::json sweep;
  try {
    sweep = nlohmann::json::parse(sweep_file);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("sweep file: ") + e.what());
  }
  const fs::path base = fs::path(config.sweep_path).parent_path();

  struct Policy {
    std::string name;
    ErrorPolicy policy;
  };
  std::vector<GraphSource> graphs;
  std::vector<std::string> weights;
  std::vector<std::uint32_t> ks;
  std::vector<std::uint32_t> js;
  std::vector<Policy> policies;
  std::vector<std::uint64_t> master_seeds;
  std::uint32_t oracle_rounds = 1000;
  std::uint64_t oracle_seed = 0;
  try {
    for (const auto& g : sweep.at("graphs")) {
      GraphSource source;
      fs::path p = g.at("path").get<std::string>();
      source.path = (p.is_relative() && !base.empty() ? base / p : p).string();
      source.directed = g.value("directed", true);
      graphs.push_back(source);
    }
    weights = sweep.value("weights", std::vector<std::string>{"const:0.01"});
    ks = sweep.at("k").get<std::vector<std::uint32_t>>();
    js = sweep.value("j", std::vector<std::uint32_t>{256});
    if (sweep.contains("policies")) {
      for (const auto& p : sweep["policies"]) {
        Policy pol;
        pol.name = p.at("name").get<std::string>();
        if (p.contains("eps_l")) pol.policy.eps_l = read_threshold(p["eps_l"]);
        if (p.contains("eps_g")) pol.policy.eps_g = read_threshold(p["eps_g"]);
        if (p.contains("eps_c")) pol.policy.eps_c = p["eps_c"].get<double>();
        pol.policy.validate();
        policies.push_back(pol);
      }
    } else {
      policies.push_back({"default", ErrorPolicy{}});
    }
    master_seeds = sweep.value("master_seeds", std::vector<std::uint64_t>{0});
    oracle_rounds = sweep.value("oracle_rounds", 1000u);
    oracle_seed = sweep.value("oracle_seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("sweep file: ") + e.what());
  }
  if (graphs.empty() || ks.empty() || js.empty() || weights.empty() || master_seeds.empty()) {
    throw ValidationError("sweep file: every sweep axis needs at least one value");
  }

  const ExecutionPolicy exec{config.threads, SyncMode::strict};
  std::ostringstream csv;
  csv << "graph,weights,k,j,policy,eps_l,eps_g,eps_c,master_seed,wall_seconds,peak_rss_kb,"
         "rebuilds,simulate_passes,sigma_final,oracle_mean,oracle_stderr,oracle_rounds\n";
  for (const auto& source : graphs) {
    for (const auto& w : weights) {
      GraphSource src = source;
      src.weights = w;
      const LoadedGraph loaded = load(src);
      for (auto k : ks) {
        for (auto j : js) {
          for (const auto& pol : policies) {
            for (auto seed : master_seeds) {
              const SimulationSet sims(j, seed);
              SeederOptions options;
              options.policy = pol.policy;
              options.exec = exec;
              const auto start = std::chrono::steady_clock::now();
              const SeedResult result = select_seeds(loaded.graph, k, sims, options);
              const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
              const InfluenceScore score =
                  oracle_influence(loaded.graph, result.seeds, {oracle_rounds, oracle_seed, exec});
              csv << fmt::format("{},{},{},{},{},{},{},{},{},{:.6f},{},{},{},{},{},{},{}\n",
                                 src.path, w, k, j, pol.name, pol.policy.eps_l, pol.policy.eps_g,
                                 pol.policy.eps_c, seed, wall.count(), peak_rss_kb(),
                                 result.rebuild_count(), result.simulate_passes,
                                 result.sigma_final, score.mean, score.std_error, score.rounds);
              log << fmt::format("{} {} k={} j={} {} seed={}: {:.3f}s, {} rebuilds, oracle {:.2f}\n",
                                 src.path, w, k, j, pol.name, seed, wall.count(),
                                 result.rebuild_count(), score.mean);
            }
          }
        }
      }
    }
  }
  write_output(config.output_path, out, [&](std::ostream& os) { os << csv.str(); });
  return kOk;
}

int cmd_generate(const GenerateConfig& config, std::ostream& out, std::ostream&) {
  std::vector<RawEdge> edges;
  if (config.model == "nethep") {
    edges = generators::power_law(generators::kNetHepVertices, generators::kNetHepEdges, 2.5,
                                  config.seed);
  } else if (config.model == "powerlaw") {
    edges = generators::power_law(config.n, config.m, config.exponent, config.seed);
  } else if (config.model == "er") {
    edges = generators::erdos_renyi(config.n, config.p, config.seed);
  } else if (config.model == "star") {
    if (config.n == 0) throw ValidationError("star needs at least one vertex");
    edges = generators::star(config.n - 1);
  } else {
    throw ValidationError("unknown generator '" + config.model + "'");
  }
  write_output(config.output_path, out, [&](std::ostream& os) {
    os << "# " << config.model << " seed " << config.seed << ", directed edges\n";
    for (const auto& e : edges) os << e.src << ' ' << e.dst << '\n';
  });
  return kOk;
}

namespace {

std::optional<std::string> env(const char* name) {
  const char* value = std::getenv(name);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return std::string(value);
}

template <typename T>
void env_default(const char* name, T& target) {
  if (auto v = env(name)) {
    try {
      if constexpr (std::is_same_v<T, int>) {
        target = std::stoi(*v);
      } else {
        target = static_cast<T>(std::stoull(*v));
      }
    } catch (const std::exception&) {
      throw ValidationError(std::string(name) + " is not a number: '" + *v + "'");
    }
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    RunConfig select;
    EvaluateConfig evaluate;
    BiasConfig bias;
    BenchConfig bench;
    GenerateConfig generate;
    env_default("SKETCHIM_THREADS", select.threads);
    evaluate.threads = bench.threads = select.threads;
    env_default("SKETCHIM_SEED", select.master_seed);
    bias.master_seed = select.master_seed;

    CLI::App app{"Sketch-based influence maximization under Independent Cascade"};
    app.require_subcommand(1);

    bool select_undirected = false, evaluate_undirected = false, bias_undirected = false;
    std::string mode = "strict";

    auto* sel = app.add_subcommand("select", "Pick K seeds and write the result as JSON");
    sel->add_option("-g,--graph", select.graph.path, "Edge list or CSR cache")->required();
    sel->add_flag("--undirected", select_undirected, "Each input line is an undirected edge");
    sel->add_option("-w,--weights", select.graph.weights, "const:<w> | wc | input")
        ->capture_default_str();
    sel->add_option("-k,--k", select.k, "Number of seeds")->capture_default_str();
    sel->add_option("-j,--j", select.j, "Number of simulations")->capture_default_str();
    sel->add_option("--eps-l", select.eps_l, "Local error threshold (inf = never rebuild)")
        ->capture_default_str();
    sel->add_option("--eps-g", select.eps_g, "Global error threshold")->capture_default_str();
    sel->add_option("--eps-c", select.eps_c, "Diffusion cutoff fraction")->capture_default_str();
    sel->add_option("--seed", select.master_seed, "Master seed")->capture_default_str();
    sel->add_option("-t,--threads", select.threads, "Worker threads (0 = all)");
    sel->add_option("--mode", mode, "strict | relaxed")
        ->check(CLI::IsMember({"strict", "relaxed"}))
        ->capture_default_str();
    sel->add_option("-o,--out", select.output_path, "Output file (default stdout)");
    sel->add_flag("--trace", select.trace, "Log every diffusion iteration");

    auto* ev = app.add_subcommand("evaluate", "Monte-Carlo influence of a seed set");
    ev->add_option("-g,--graph", evaluate.graph.path, "Edge list or CSR cache")->required();
    ev->add_flag("--undirected", evaluate_undirected, "Each input line is an undirected edge");
    ev->add_option("-w,--weights", evaluate.graph.weights, "const:<w> | wc | input")
        ->capture_default_str();
    ev->add_option("-s,--seeds", evaluate.seeds_path, "Seed list or select output")->required();
    ev->add_option("-r,--rounds", evaluate.rounds, "Monte-Carlo rounds")->capture_default_str();
    ev->add_option("--rng-seed", evaluate.rng_seed, "Oracle RNG seed")->capture_default_str();
    ev->add_option("-t,--threads", evaluate.threads, "Worker threads (0 = all)");
    ev->add_flag("--curve", evaluate.curve, "One CSV row per seed prefix");
    ev->add_option("-o,--out", evaluate.output_path, "CSV output file");

    auto* bs = app.add_subcommand("bias-stats", "Histogram of sampled edge probabilities");
    bs->add_option("-g,--graph", bias.graph.path, "Edge list or CSR cache")->required();
    bs->add_flag("--undirected", bias_undirected, "Each input line is an undirected edge");
    bs->add_option("-j,--j", bias.j, "Number of simulations")->capture_default_str();
    bs->add_option("--samples", bias.samples, "Number of (edge, simulation) draws")
        ->capture_default_str();
    bs->add_option("--bins", bias.bins, "Histogram bins")->capture_default_str();
    bs->add_option("--seed", bias.master_seed, "Master seed")->capture_default_str();
    bs->add_option("-o,--out", bias.output_path, "CSV output file (default stdout)");

    auto* bn = app.add_subcommand("bench", "Run a parameter sweep and write one CSV row per run");
    bn->add_option("sweep", bench.sweep_path, "Sweep description (JSON)")->required();
    bn->add_option("-t,--threads", bench.threads, "Worker threads (0 = all)");
    bn->add_option("-o,--out", bench.output_path, "CSV output file (default stdout)");

    auto* gen = app.add_subcommand("generate", "Write a synthetic edge list");
    gen->add_option("--model", generate.model, "nethep | powerlaw | er | star")
        ->capture_default_str();
    gen->add_option("-n,--n", generate.n, "Vertices")->capture_default_str();
    gen->add_option("-m,--m", generate.m, "Undirected edges (powerlaw)")->capture_default_str();
    gen->add_option("-p,--p", generate.p, "Edge probability (er)")->capture_default_str();
    gen->add_option("--exponent", generate.exponent, "Degree exponent (powerlaw)")
        ->capture_default_str();
    gen->add_option("--seed", generate.seed, "Generator seed")->capture_default_str();
    gen->add_option("-o,--out", generate.output_path, "Output file (default stdout)");

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kUsage;
    }

    select.graph.directed = !select_undirected;
    evaluate.graph.directed = !evaluate_undirected;
    bias.graph.directed = !bias_undirected;
    select.mode = mode == "relaxed" ? SyncMode::relaxed : SyncMode::strict;

    if (*sel) return cmd_select(select, out, err);
    if (*ev) return cmd_evaluate(evaluate, out, err);
    if (*bs) return cmd_bias_stats(bias, out, err);
    if (*bn) return cmd_bench(bench, out, err);
    if (*gen) return cmd_generate(generate, out, err);
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidationError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace sketchim::cli
