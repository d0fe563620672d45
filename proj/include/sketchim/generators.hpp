#pragma once

#include <cstdint>
#include <vector>

#include "sketchim/graph.hpp"

// Synthetic fixtures used by the test suites, the bench sweeps and
// `sketchim generate`. All generators are deterministic in their seed.
namespace sketchim::generators {

/// G(n, p) directed graph without self-loops.
std::vector<RawEdge> erdos_renyi(vertex_t n, double p, std::uint64_t seed);

/// Center 0 with out-edges to vertices 1..leaves.
std::vector<RawEdge> star(vertex_t leaves);

/// Undirected Chung-Lu graph with power-law expected degrees and exactly
/// `undirected_edges` distinct pairs, emitted in both directions. With
/// n = 15,235 and 58,892 pairs it matches the size of the NetHEP
/// collaboration network.
std::vector<RawEdge> power_law(vertex_t n, std::uint64_t undirected_edges, double exponent,
                               std::uint64_t seed);

inline constexpr vertex_t kNetHepVertices = 15'235;
inline constexpr std::uint64_t kNetHepEdges = 58'892;

/// NetHEP-sized power-law fixture with every edge weighted `w`.
CsrGraph nethep_like(double w, std::uint64_t seed = 2024);

}  // namespace sketchim::generators
