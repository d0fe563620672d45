#include "sketchim/graph.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_map>

namespace sketchim {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (is_space(line[i]) || line[i] == ',')) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_space(line[i]) && line[i] != ',') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

void check_weight(double w, const char* what) {
  if (!(w >= 0.0 && w <= 1.0)) {
    throw ValidationError(std::string(what) + " must lie in [0,1], got " + std::to_string(w));
  }
}

}  // namespace

EdgeList parse_edge_list(std::istream& in, const ParseOptions& options) {
  EdgeList list;
  std::unordered_map<std::int64_t, vertex_t> ids;
  auto compact = [&](std::int64_t label) {
    auto [it, inserted] = ids.try_emplace(label, static_cast<vertex_t>(list.labels.size()));
    if (inserted) list.labels.push_back(label);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    while (!view.empty() && is_space(view.front())) view.remove_prefix(1);
    if (view.empty()) continue;
    if (!options.comment_prefix.empty() && view.starts_with(options.comment_prefix)) continue;

    auto fields = split_fields(view);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(lineno, "expected 'u v' or 'u v w', got '" + std::string(view) + "'");
    }
    std::int64_t u = 0;
    std::int64_t v = 0;
    if (!parse_number(fields[0], u) || !parse_number(fields[1], v)) {
      throw ParseError(lineno, "vertex ids must be integers");
    }
    double w = 1.0;
    if (fields.size() == 3) {
      if (!parse_number(fields[2], w) || !std::isfinite(w)) {
        throw ParseError(lineno, "weight is not a number");
      }
      if (w < 0.0) {
        throw ValidationError("line " + std::to_string(lineno) + ": negative weight");
      }
    }
    vertex_t cu = compact(u);
    vertex_t cv = compact(v);
    list.edges.push_back({cu, cv, w});
    if (!options.directed) list.edges.push_back({cv, cu, w});
  }
  if (in.bad()) throw IoError("failed while reading edge list");
  if (list.labels.size() > std::numeric_limits<vertex_t>::max()) {
    throw ValidationError("too many vertices");
  }
  return list;
}

WeightModel parse_weight_model(std::string_view spec) {
  if (spec == "wc") return WeightedCascade{};
  if (spec == "input") return InputWeight{};
  constexpr std::string_view prefix = "const:";
  if (spec.starts_with(prefix)) {
    double w = 0.0;
    if (!parse_number(spec.substr(prefix.size()), w)) {
      throw ValidationError("bad constant weight in '" + std::string(spec) + "'");
    }
    check_weight(w, "constant weight");
    return ConstantWeight{w};
  }
  throw ValidationError("unknown weight model '" + std::string(spec) +
                        "' (expected const:<w>, wc or input)");
}

std::string to_string(const WeightModel& model) {
  struct Visitor {
    std::string operator()(const ConstantWeight& c) const {
      std::array<char, 64> buf{};
      auto res = std::to_chars(buf.data(), buf.data() + buf.size(), c.w);
      return "const:" + std::string(buf.data(), res.ptr);
    }
    std::string operator()(const WeightedCascade&) const { return "wc"; }
    std::string operator()(const InputWeight&) const { return "input"; }
  };
  return std::visit(Visitor{}, model);
}

std::vector<RawEdge> assign_weights(std::vector<RawEdge> edges, const WeightModel& model) {
  if (const auto* c = std::get_if<ConstantWeight>(&model)) {
    check_weight(c->w, "constant weight");
    for (auto& e : edges) e.weight = c->w;
  } else if (std::holds_alternative<WeightedCascade>(model)) {
    std::vector<std::pair<vertex_t, vertex_t>> pairs;
    pairs.reserve(edges.size());
    vertex_t n = 0;
    for (const auto& e : edges) {
      n = std::max(n, std::max(e.src, e.dst) + 1);
      if (e.src != e.dst) pairs.emplace_back(e.src, e.dst);
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    std::vector<std::uint32_t> in_degree(n, 0);
    for (const auto& [u, v] : pairs) ++in_degree[v];
    for (auto& e : edges) {
      e.weight = in_degree[e.dst] > 0 ? 1.0 / in_degree[e.dst] : 0.0;
    }
  }
  return edges;
}

CsrGraph CsrGraph::from_arrays(std::vector<std::uint32_t> xadj, std::vector<vertex_t> adj,
                               std::vector<float> weight) {
  if (xadj.empty() || xadj.front() != 0) throw ValidationError("xadj must start with 0");
  if (adj.size() != weight.size()) throw ValidationError("adj and weight differ in length");
  if (xadj.back() != adj.size()) throw ValidationError("xadj[n] must equal m");
  if (!std::is_sorted(xadj.begin(), xadj.end())) throw ValidationError("xadj must be non-decreasing");
  const auto n = static_cast<vertex_t>(xadj.size() - 1);

  CsrGraph g;
  g.in_degree_.assign(n, 0);
  for (vertex_t u = 0; u < n; ++u) {
    for (auto i = xadj[u]; i < xadj[u + 1]; ++i) {
      if (adj[i] >= n) throw ValidationError("adjacency entry out of range");
      if (i > xadj[u] && adj[i] <= adj[i - 1]) {
        throw ValidationError("rows must be strictly increasing (no duplicates)");
      }
      if (!(weight[i] >= 0.0f && weight[i] <= 1.0f)) {
        throw ValidationError("edge weight outside [0,1]");
      }
      ++g.in_degree_[adj[i]];
    }
  }
  g.xadj_ = std::move(xadj);
  g.adj_ = std::move(adj);
  g.weight_ = std::move(weight);
  return g;
}

CsrGraph build_csr(std::span<const RawEdge> edges, vertex_t n) {
  std::vector<RawEdge> sorted;
  sorted.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.src >= n || e.dst >= n) throw ValidationError("edge endpoint out of range");
    check_weight(e.weight, "edge weight");
    if (e.src != e.dst) sorted.push_back(e);
  }
  std::sort(sorted.begin(), sorted.end(), [](const RawEdge& a, const RawEdge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });

  std::vector<std::uint32_t> xadj(static_cast<std::size_t>(n) + 1, 0);
  std::vector<vertex_t> adj;
  std::vector<float> weight;
  adj.reserve(sorted.size());
  weight.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& e = sorted[i];
    if (i > 0 && sorted[i - 1].src == e.src && sorted[i - 1].dst == e.dst) {
      weight.back() = std::max(weight.back(), static_cast<float>(e.weight));
      continue;
    }
    adj.push_back(e.dst);
    weight.push_back(static_cast<float>(e.weight));
    ++xadj[e.src + 1];
  }
  if (adj.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("edge count exceeds 32-bit offsets");
  }
  for (std::size_t v = 0; v < n; ++v) xadj[v + 1] += xadj[v];
  return CsrGraph::from_arrays(std::move(xadj), std::move(adj), std::move(weight));
}

namespace {

constexpr std::array<char, 4> kCacheMagic = {'C', 'S', 'R', '1'};

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T read_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw IoError("truncated CSR cache");
  }
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_csr_cache(const CsrGraph& graph, std::ostream& out) {
  out.write(kCacheMagic.data(), kCacheMagic.size());
  write_le<std::uint64_t>(out, graph.num_vertices());
  write_le<std::uint64_t>(out, graph.num_edges());
  for (auto x : graph.xadj()) write_le<std::uint32_t>(out, x);
  for (auto v : graph.adj()) write_le<std::uint32_t>(out, v);
  for (auto w : graph.weight()) write_le<float>(out, w);
  if (!out) throw IoError("failed to write CSR cache");
}

CsrGraph read_csr_cache(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kCacheMagic) {
    throw IoError("not a CSR1 cache");
  }
  auto n = read_le<std::uint64_t>(in);
  auto m = read_le<std::uint64_t>(in);
  if (n >= std::numeric_limits<vertex_t>::max() || m > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("CSR cache header out of range");
  }
  std::vector<std::uint32_t> xadj(n + 1);
  std::vector<vertex_t> adj(m);
  std::vector<float> weight(m);
  for (auto& x : xadj) x = read_le<std::uint32_t>(in);
  for (auto& v : adj) v = read_le<std::uint32_t>(in);
  for (auto& w : weight) w = read_le<float>(in);
  return CsrGraph::from_arrays(std::move(xadj), std::move(adj), std::move(weight));
}

LoadedGraph load_graph(const std::filesystem::path& path, const ParseOptions& options,
                       const WeightModel& model) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  bool is_cache = in.gcount() == 4 && magic == kCacheMagic;
  in.clear();
  in.seekg(0);

  LoadedGraph loaded;
  if (is_cache) {
    loaded.graph = read_csr_cache(in);
    const vertex_t n = loaded.graph.num_vertices();
    loaded.labels.resize(n);
    for (vertex_t v = 0; v < n; ++v) loaded.labels[v] = v;
    if (std::holds_alternative<InputWeight>(model)) return loaded;

    std::vector<RawEdge> edges;
    edges.reserve(loaded.graph.num_edges());
    for (vertex_t u = 0; u < n; ++u) {
      auto nbrs = loaded.graph.out_neighbors(u);
      auto ws = loaded.graph.out_weights(u);
      for (std::size_t i = 0; i < nbrs.size(); ++i) edges.push_back({u, nbrs[i], ws[i]});
    }
    loaded.graph = build_csr(assign_weights(std::move(edges), model), n);
    return loaded;
  }

  EdgeList list = parse_edge_list(in, options);
  const vertex_t n = list.num_vertices();
  loaded.graph = build_csr(assign_weights(std::move(list.edges), model), n);
  loaded.labels = std::move(list.labels);
  return loaded;
}

}  // namespace sketchim
