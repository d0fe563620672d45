#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "sketchim/diffusion.hpp"

namespace sketchim {

/// Thresholds of the rebuild test. Infinity disables a threshold's effect:
/// eps = inf never rebuilds, eps = 0 rebuilds whenever the estimate is off.
struct ErrorPolicy {
  double eps_l = 0.3;
  double eps_g = 0.01;
  double eps_c = 0.02;

  static ErrorPolicy never_rebuild(double eps_c = 0.02) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {inf, inf, eps_c};
  }
  static ErrorPolicy always_rebuild(double eps_c = 0.02) { return {0.0, 0.0, eps_c}; }

  void validate() const;
};

struct StepRecord {
  vertex_t vertex = 0;
  double estimate = 0.0;  // e: sketch estimate of the gain since the last rebuild
  double delta = 0.0;     // sigma minus sigma at the last rebuild
  double sigma = 0.0;     // fused-sample influence of the seeds so far
  double err_l = 0.0;
  double err_g = 0.0;
  bool rebuilt = false;
};

struct SeedResult {
  std::vector<vertex_t> seeds;
  std::vector<StepRecord> steps;
  double sigma_final = 0.0;
  std::size_t simulate_passes = 0;

  std::size_t rebuild_count() const;
};

struct ReachResult {
  ReachSet reach;
  double sigma = 0.0;
};

/// Per-simulation BFS from the seeds over the edges sampled in that
/// simulation; sigma is the mean reach size.
ReachResult exact_reach(const FusedGraph& graph, std::span<const vertex_t> seeds,
                        const SimulationSet& sims, const ExecutionPolicy& exec = {});

/// err_l = |(e - delta) / delta|, err_g = |(e - delta) / sigma|; keep the
/// sketches iff err_l < eps_l or err_g < eps_g. err_l is +inf when
/// delta <= 0.
bool should_rebuild(double e, double delta, double sigma, const ErrorPolicy& policy);

struct SeederOptions {
  ErrorPolicy policy;
  ExecutionPolicy exec;
  std::function<void(std::size_t k, const StepRecord&)> on_step;
  std::function<void(const DiffusionTrace&)> diffusion_trace;
};

/// Greedy seed selection over sketch estimates with error-adaptive rebuilds.
SeedResult select_seeds(const CsrGraph& graph, std::uint32_t k, const SimulationSet& sims,
                        const SeederOptions& options = {});

}  // namespace sketchim
