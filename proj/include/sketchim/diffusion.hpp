#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sketchim/graph.hpp"
#include "sketchim/hashing.hpp"
#include "sketchim/sketch.hpp"

namespace sketchim {

/// One bitset of n bits per simulation; bit (j, v) is set iff v is reached
/// by the current seed set in sampled subgraph j.
class ReachSet {
 public:
  ReachSet() = default;
  ReachSet(vertex_t n, std::uint32_t simulations);

  vertex_t num_vertices() const { return n_; }
  std::uint32_t simulations() const { return j_; }

  bool test(std::uint32_t j, vertex_t v) const {
    return (words_[word_index(j, v)] >> (v % 64)) & 1u;
  }
  void set(std::uint32_t j, vertex_t v) { words_[word_index(j, v)] |= std::uint64_t{1} << (v % 64); }

  /// Words of simulation j's bitset.
  std::span<std::uint64_t> bits(std::uint32_t j) {
    return std::span(words_).subspan(static_cast<std::size_t>(j) * words_per_sim_, words_per_sim_);
  }
  std::span<const std::uint64_t> bits(std::uint32_t j) const {
    return std::span(words_).subspan(static_cast<std::size_t>(j) * words_per_sim_, words_per_sim_);
  }

  std::size_t count(std::uint32_t j) const;
  bool empty() const;
  void clear();

  bool operator==(const ReachSet&) const = default;

 private:
  std::size_t word_index(std::uint32_t j, vertex_t v) const {
    return static_cast<std::size_t>(j) * words_per_sim_ + v / 64;
  }

  vertex_t n_ = 0;
  std::uint32_t j_ = 0;
  std::size_t words_per_sim_ = 0;
  std::vector<std::uint64_t> words_;
};

/// A graph prepared for fused sampling: edge hashes, integer liveness
/// thresholds per edge slot and the transposed adjacency used to find the
/// vertices that must pull in the next iteration.
class FusedGraph {
 public:
  explicit FusedGraph(const CsrGraph& graph);

  const CsrGraph& graph() const { return *graph_; }
  std::span<const std::uint32_t> hashes() const { return hashes_.hashes(); }
  std::span<const std::uint32_t> thresholds() const { return thresholds_; }
  std::span<const vertex_t> in_neighbors(vertex_t v) const {
    return std::span(in_adj_).subspan(in_xadj_[v], in_xadj_[v + 1] - in_xadj_[v]);
  }

  /// Same answer as edge_live(hashes()[slot], r, sims, weight[slot]).
  bool live(std::size_t slot, std::uint32_t salt) const {
    return (salt ^ hashes_[slot]) < thresholds_[slot];
  }

 private:
  const CsrGraph* graph_;
  EdgeHashCache hashes_;
  std::vector<std::uint32_t> thresholds_;
  std::vector<std::uint32_t> in_xadj_;
  std::vector<vertex_t> in_adj_;
};

struct FrontierStats {
  std::size_t live_count = 0;
  std::size_t iteration = 0;
};

/// Live set L of the current iteration: vertices whose registers changed in
/// the previous iteration (all vertices before the first one).
class FrontierState {
 public:
  explicit FrontierState(vertex_t n);

  std::span<const vertex_t> live() const { return live_; }
  bool is_live(vertex_t v) const { return flags_[v] != 0; }
  std::size_t iteration() const { return iteration_; }

  /// Installs L' as the new live set (sorted, without duplicates).
  void advance(std::vector<vertex_t> next);

 private:
  std::vector<vertex_t> live_;
  std::vector<std::uint8_t> flags_;
  std::size_t iteration_ = 0;
};

FrontierStats frontier_stats(const FrontierState& state);

struct DiffusionTrace {
  std::size_t iteration = 0;
  std::size_t live_count = 0;
  std::chrono::duration<double> elapsed{};
};

struct DiffusionOptions {
  double eps_c = 0.02;  // stop once |L| / n <= eps_c
  ExecutionPolicy exec;
  std::function<void(const DiffusionTrace&)> trace;
};

struct DiffusionSummary {
  std::size_t iterations = 0;
  std::size_t final_live = 0;
};

/// Pull-based fused diffusion over all simulations at once.
///
/// Each iteration visits the vertices u with at least one live out-neighbor
/// v. For every edge (u,v) with v live and every simulation j in which the
/// edge is sampled and u is not in reach[j], regs[u][j] takes
/// max(regs[u][j], regs[v][j]). Vertices whose registers changed form the
/// next live set. Registers of vertices in reach[j] are zeroed up front.
class DiffusionEngine {
 public:
  DiffusionEngine(const FusedGraph& graph, SketchMatrix& matrix, const SimulationSet& sims,
                  const ReachSet& reach, DiffusionOptions options);

  /// True while the exit test still asks for another iteration.
  bool should_continue() const;

  /// Runs one iteration; returns the number of vertices that changed.
  std::size_t step();

  DiffusionSummary run();

  const FrontierState& frontier() const { return frontier_; }

 private:
  void collect_work();
  std::size_t step_strict(int threads);
  std::size_t step_relaxed(int threads);

  const FusedGraph& graph_;
  SketchMatrix& matrix_;
  const SimulationSet& sims_;
  DiffusionOptions options_;
  FrontierState frontier_;
  // Per-vertex masks (0xFF = blocked) for simulations where the vertex is
  // already reached; empty when nothing is blocked.
  std::vector<Register> blocked_;
  std::vector<std::uint8_t> fully_blocked_;
  std::vector<vertex_t> work_;
  std::vector<std::uint8_t> work_flags_;
};

/// Runs the diffusion to the eps_c exit test; the matrix must hold freshly
/// initialized registers.
DiffusionSummary simulate(const FusedGraph& graph, SketchMatrix& matrix, const SimulationSet& sims,
                          const ReachSet& reach, const DiffusionOptions& options);

}  // namespace sketchim
