#include "sketchim/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace sketchim::generators {

std::vector<RawEdge> erdos_renyi(vertex_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<RawEdge> edges;
  for (vertex_t u = 0; u < n; ++u) {
    for (vertex_t v = 0; v < n; ++v) {
      if (u != v && coin(rng) < p) edges.push_back({u, v, 1.0});
    }
  }
  return edges;
}

std::vector<RawEdge> star(vertex_t leaves) {
  std::vector<RawEdge> edges;
  edges.reserve(leaves);
  for (vertex_t v = 1; v <= leaves; ++v) edges.push_back({0, v, 1.0});
  return edges;
}

std::vector<RawEdge> power_law(vertex_t n, std::uint64_t undirected_edges, double exponent,
                               std::uint64_t seed) {
  const auto max_pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  if (n < 2 || undirected_edges > max_pairs / 2) {
    throw ValidationError("power_law: edge count too large for n");
  }
  // Chung-Lu weights w_i ~ (i + i0)^(-1/(exponent-1)); endpoints are drawn
  // proportionally to weight until enough distinct pairs exist.
  std::vector<double> weights(n);
  const double alpha = 1.0 / (exponent - 1.0);
  for (vertex_t i = 0; i < n; ++i) weights[i] = std::pow(static_cast<double>(i) + 10.0, -alpha);
  std::discrete_distribution<vertex_t> pick(weights.begin(), weights.end());
  std::mt19937_64 rng(seed);

  // Shuffle labels so high-degree vertices are not simply the low IDs.
  std::vector<vertex_t> label(n);
  for (vertex_t i = 0; i < n; ++i) label[i] = i;
  std::shuffle(label.begin(), label.end(), rng);

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(undirected_edges * 2);
  std::vector<RawEdge> edges;
  edges.reserve(undirected_edges * 2);
  while (seen.size() < undirected_edges) {
    vertex_t a = label[pick(rng)];
    vertex_t b = label[pick(rng)];
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!seen.insert((static_cast<std::uint64_t>(a) << 32) | b).second) continue;
    edges.push_back({a, b, 1.0});
    edges.push_back({b, a, 1.0});
  }
  return edges;
}

CsrGraph nethep_like(double w, std::uint64_t seed) {
  auto edges = power_law(kNetHepVertices, kNetHepEdges, 2.5, seed);
  return build_csr(assign_weights(std::move(edges), ConstantWeight{w}), kNetHepVertices);
}

}  // namespace sketchim::generators
