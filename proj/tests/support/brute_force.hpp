#pragma once

// Reference implementations used only by the tests. They recompute every
// quantity from the public hash primitives with plain per-simulation graph
// traversals, sharing no code with the fused engine.

#include <cstdint>
#include <vector>

#include "sketchim/diffusion.hpp"
#include "sketchim/graph.hpp"
#include "sketchim/hashing.hpp"
#include "sketchim/sketch.hpp"

namespace sketchim::testing {

/// Adjacency of simulation j's sampled subgraph, decided with the
/// floating-point liveness test.
std::vector<std::vector<vertex_t>> materialize(const CsrGraph& graph, const SimulationSet& sims,
                                               std::uint32_t j);

/// clz32(murmur3(v, vertex seed) ^ murmur3(j, simulation seed)).
Register reference_register(vertex_t v, std::uint32_t j);

/// Fixed point of the register diffusion: regs[v][j] is the largest initial
/// register over vertices reachable from v in simulation j without passing
/// through reach[j]; 0 when v itself is in reach[j]. `reach` may be null.
std::vector<std::vector<Register>> fixed_point(const CsrGraph& graph, const SimulationSet& sims,
                                               const ReachSet* reach);

/// Mean over simulations of |vertices reachable from seeds|.
double materialized_sigma(const CsrGraph& graph, const SimulationSet& sims,
                          const std::vector<vertex_t>& seeds);

/// Random directed graph with uniform weights in [0, 1] drawn from `seed`.
CsrGraph random_graph(vertex_t n, double p, std::uint64_t seed);

}  // namespace sketchim::testing
