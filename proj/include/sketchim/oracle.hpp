#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sketchim/graph.hpp"

namespace sketchim {

/// Plain sample-then-diffuse Monte-Carlo evaluator, independent of the
/// hash-based sampler. Round r draws from mt19937(rng_seed + r), one 32-bit
/// output per edge in CSR order; the edge is kept iff draw / 2^32 < w.
struct OracleConfig {
  std::uint32_t rounds = 10'000;
  std::uint64_t rng_seed = 0;
  ExecutionPolicy exec;
};

struct InfluenceScore {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint32_t rounds = 0;
};

InfluenceScore oracle_influence(const CsrGraph& graph, std::span<const vertex_t> seeds,
                                const OracleConfig& config);

/// Kempe-style greedy: each step samples `rounds` fresh subgraphs, shares
/// them across all candidates, and adds the vertex with the largest mean
/// marginal reach. Ties go to the lowest id.
std::vector<vertex_t> greedy_baseline(const CsrGraph& graph, std::uint32_t k,
                                      const OracleConfig& config);

/// Columns: seed_set_size,mean,stderr,R.
void write_oracle_csv_header(std::ostream& out);
void write_oracle_csv_row(std::ostream& out, std::size_t seed_set_size, const InfluenceScore& score);

}  // namespace sketchim
