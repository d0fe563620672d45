#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sketchim/common.hpp"
#include "sketchim/seeder.hpp"

namespace sketchim::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIoError = 2,
  kValidationError = 3,
  kParseError = 4,
  kInternalError = 5,
};

inline constexpr int kFormatVersion = 1;

struct GraphSource {
  std::string path;
  bool directed = true;
  std::string weights = "const:0.01";
};

struct RunConfig {
  GraphSource graph;
  std::uint32_t k = 50;
  std::uint32_t j = 256;
  double eps_l = 0.3;
  double eps_g = 0.01;
  double eps_c = 0.02;
  std::uint64_t master_seed = 0;
  int threads = 0;
  SyncMode mode = SyncMode::strict;
  std::string output_path;  // empty = stdout
  bool trace = false;

  /// Throws ValidationError for anything a later stage would reject.
  void validate() const;
  ErrorPolicy policy() const { return {eps_l, eps_g, eps_c}; }
};

struct EvaluateConfig {
  GraphSource graph;
  std::string seeds_path;
  std::uint32_t rounds = 10'000;
  std::uint64_t rng_seed = 0;
  int threads = 0;
  bool curve = false;  // one CSV row per seed prefix
  std::string output_path;

  void validate() const;
};

struct BiasConfig {
  GraphSource graph;
  std::uint32_t j = 256;
  std::uint64_t samples = 1'000'000;
  std::uint64_t master_seed = 0;
  std::size_t bins = 100;
  std::string output_path;

  void validate() const;
};

struct BenchConfig {
  std::string sweep_path;
  std::string output_path;
  int threads = 0;
};

struct GenerateConfig {
  std::string model = "nethep";  // nethep | powerlaw | er | star
  std::uint32_t n = 1000;
  std::uint64_t m = 4000;
  double p = 0.01;
  double exponent = 2.5;
  std::uint64_t seed = 2024;
  std::string output_path;
};

/// Runs seed selection and renders the result document. Per-step progress
/// goes to `log`.
std::string select_json(const RunConfig& config, std::ostream& log);

int cmd_select(const RunConfig& config, std::ostream& out, std::ostream& log);
int cmd_evaluate(const EvaluateConfig& config, std::ostream& out, std::ostream& log);
int cmd_bias_stats(const BiasConfig& config, std::ostream& out, std::ostream& log);
int cmd_bench(const BenchConfig& config, std::ostream& out, std::ostream& log);
int cmd_generate(const GenerateConfig& config, std::ostream& out, std::ostream& log);

/// Seed labels from a whitespace list or a `select` JSON document.
std::vector<std::int64_t> read_seed_labels(std::istream& in);

/// Full command line: subcommand dispatch, env overrides
/// (SKETCHIM_THREADS, SKETCHIM_SEED) and error-to-exit-code mapping.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sketchim::cli
