#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sketchim/common.hpp"

namespace sketchim {

struct RawEdge {
  vertex_t src = 0;
  vertex_t dst = 0;
  double weight = 1.0;

  bool operator==(const RawEdge&) const = default;
};

/// Edges over compacted vertex IDs plus the map back to the IDs of the input.
struct EdgeList {
  std::vector<RawEdge> edges;
  std::vector<std::int64_t> labels;  // compact id -> original id

  vertex_t num_vertices() const { return static_cast<vertex_t>(labels.size()); }
};

struct ParseOptions {
  bool directed = true;
  std::string comment_prefix = "#";
};

/// Reads "u v" / "u v w" lines. IDs are compacted in order of first
/// appearance; undirected input emits both directions.
EdgeList parse_edge_list(std::istream& in, const ParseOptions& options = {});

struct ConstantWeight {
  double w = 0.01;
};
struct WeightedCascade {};
/// Keep the weights read from the input file.
struct InputWeight {};

using WeightModel = std::variant<ConstantWeight, WeightedCascade, InputWeight>;

/// "const:<w>", "wc" or "input".
WeightModel parse_weight_model(std::string_view spec);
std::string to_string(const WeightModel& model);

/// Constant(w) overwrites every weight; WeightedCascade sets (u,v) to
/// 1/in_degree(v) with in-degrees counted over distinct non-loop pairs.
std::vector<RawEdge> assign_weights(std::vector<RawEdge> edges, const WeightModel& model);

/// Immutable directed graph in CSR form with one diffusion probability per
/// edge slot. Rows are sorted by target.
class CsrGraph {
 public:
  CsrGraph() : xadj_{0} {}

  /// Adopts CSR arrays after checking every structural invariant.
  static CsrGraph from_arrays(std::vector<std::uint32_t> xadj, std::vector<vertex_t> adj,
                              std::vector<float> weight);

  vertex_t num_vertices() const { return static_cast<vertex_t>(xadj_.size() - 1); }
  std::size_t num_edges() const { return adj_.size(); }

  std::span<const std::uint32_t> xadj() const { return xadj_; }
  std::span<const vertex_t> adj() const { return adj_; }
  std::span<const float> weight() const { return weight_; }
  std::span<const std::uint32_t> in_degree() const { return in_degree_; }

  std::uint32_t out_degree(vertex_t v) const { return xadj_[v + 1] - xadj_[v]; }
  std::span<const vertex_t> out_neighbors(vertex_t v) const {
    return std::span(adj_).subspan(xadj_[v], out_degree(v));
  }
  std::span<const float> out_weights(vertex_t v) const {
    return std::span(weight_).subspan(xadj_[v], out_degree(v));
  }

 private:
  std::vector<std::uint32_t> xadj_;
  std::vector<vertex_t> adj_;
  std::vector<float> weight_;
  std::vector<std::uint32_t> in_degree_;
};

/// Sorts, drops self-loops and merges duplicate (u,v) pairs keeping the
/// largest weight.
CsrGraph build_csr(std::span<const RawEdge> edges, vertex_t n);

/// Binary cache: "CSR1", n and m as u64, then xadj and adj as u32 and the
/// weights as f32, all little-endian.
void write_csr_cache(const CsrGraph& graph, std::ostream& out);
CsrGraph read_csr_cache(std::istream& in);

struct LoadedGraph {
  CsrGraph graph;
  std::vector<std::int64_t> labels;
};

/// Loads either an edge list or a CSR cache (detected by magic). A cache
/// keeps its stored weights unless the model is not InputWeight, in which
/// case the model is applied to the cached edges.
LoadedGraph load_graph(const std::filesystem::path& path, const ParseOptions& options,
                       const WeightModel& model);

}  // namespace sketchim
