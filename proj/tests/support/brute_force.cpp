#include "brute_force.hpp"

#include <bit>
#include <random>

#include "sketchim/generators.hpp"

namespace sketchim::testing {

std::vector<std::vector<vertex_t>> materialize(const CsrGraph& graph, const SimulationSet& sims,
                                               std::uint32_t j) {
  std::vector<std::vector<vertex_t>> out(graph.num_vertices());
  for (vertex_t u = 0; u < graph.num_vertices(); ++u) {
    const auto nbrs = graph.out_neighbors(u);
    const auto ws = graph.out_weights(u);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (edge_live(edge_hash(u, nbrs[i]), j, sims, ws[i])) out[u].push_back(nbrs[i]);
    }
  }
  return out;
}

Register reference_register(vertex_t v, std::uint32_t j) {
  const std::uint32_t x = murmur3_32(v, kVertexHashSeed) ^ murmur3_32(j, kSimulationHashSeed);
  return static_cast<Register>(std::countl_zero(x));
}

namespace {

std::vector<vertex_t> reachable(const std::vector<std::vector<vertex_t>>& adj,
                                const std::vector<vertex_t>& sources,
                                const std::vector<bool>& forbidden) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<vertex_t> order;
  for (auto s : sources) {
    if (!seen[s] && !forbidden[s]) {
      seen[s] = true;
      order.push_back(s);
    }
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (auto v : adj[order[i]]) {
      if (!seen[v] && !forbidden[v]) {
        seen[v] = true;
        order.push_back(v);
      }
    }
  }
  return order;
}

}  // namespace

std::vector<std::vector<Register>> fixed_point(const CsrGraph& graph, const SimulationSet& sims,
                                               const ReachSet* reach) {
  const vertex_t n = graph.num_vertices();
  std::vector<std::vector<Register>> regs(n, std::vector<Register>(sims.size(), 0));
  for (std::uint32_t j = 0; j < sims.size(); ++j) {
    const auto adj = materialize(graph, sims, j);
    std::vector<bool> forbidden(n, false);
    if (reach != nullptr && reach->num_vertices() != 0) {
      for (vertex_t v = 0; v < n; ++v) forbidden[v] = reach->test(j, v);
    }
    for (vertex_t v = 0; v < n; ++v) {
      if (forbidden[v]) continue;
      Register best = 0;
      for (auto u : reachable(adj, {v}, forbidden)) best = std::max(best, reference_register(u, j));
      regs[v][j] = best;
    }
  }
  return regs;
}

double materialized_sigma(const CsrGraph& graph, const SimulationSet& sims,
                          const std::vector<vertex_t>& seeds) {
  const std::vector<bool> none(graph.num_vertices(), false);
  double total = 0.0;
  for (std::uint32_t j = 0; j < sims.size(); ++j) {
    total += static_cast<double>(reachable(materialize(graph, sims, j), seeds, none).size());
  }
  return total / sims.size();
}

CsrGraph random_graph(vertex_t n, double p, std::uint64_t seed) {
  auto edges = generators::erdos_renyi(n, p, seed);
  std::mt19937_64 rng(seed ^ 0x5eed);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  for (auto& e : edges) e.weight = weight(rng);
  return build_csr(edges, n);
}

}  // namespace sketchim::testing
