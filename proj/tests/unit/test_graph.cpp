#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sketchim/generators.hpp"
#include "sketchim/graph.hpp"

using namespace sketchim;

namespace {

EdgeList parse(const std::string& text, bool directed = true) {
  std::istringstream in(text);
  ParseOptions opts;
  opts.directed = directed;
  return parse_edge_list(in, opts);
}

std::vector<std::uint32_t> to_vec(std::span<const std::uint32_t> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("parse directed lines") {
    auto list = parse("0 1\n1 2\n");
    REQUIRE(list.edges.size() == 2);
    CHECK(list.edges[0] == RawEdge{0, 1, 1.0});
    CHECK(list.edges[1] == RawEdge{1, 2, 1.0});
    CHECK(list.labels == std::vector<std::int64_t>{0, 1, 2});
  }

  TEST_CASE("undirected input emits both directions") {
    auto list = parse("0 1\n", false);
    REQUIRE(list.edges.size() == 2);
    CHECK(list.edges[0] == RawEdge{0, 1, 1.0});
    CHECK(list.edges[1] == RawEdge{1, 0, 1.0});
  }

  TEST_CASE("ids are compacted in order of first appearance") {
    auto list = parse("# comment\n\n100 7\n7 -3\n-3,100,0.25\n");
    CHECK(list.labels == std::vector<std::int64_t>{100, 7, -3});
    REQUIRE(list.edges.size() == 3);
    CHECK(list.edges[2] == RawEdge{2, 0, 0.25});
  }

  TEST_CASE("duplicates merge in build") {
    auto list = parse("5 9\n9 5\n5 9\n");
    auto g = build_csr(list.edges, list.num_vertices());
    CHECK(g.num_edges() == 2);
  }

  TEST_CASE("duplicate merge keeps the largest weight and drops self-loops") {
    std::vector<RawEdge> edges{{0, 1, 0.2}, {0, 1, 0.7}, {0, 1, 0.5}, {1, 1, 0.9}};
    auto g = build_csr(edges, 2);
    REQUIRE(g.num_edges() == 1);
    CHECK(g.weight()[0] == doctest::Approx(0.7));
  }

  TEST_CASE("parse errors carry the line number") {
    try {
      parse("0 1\n2\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse("0 1 2 3\n"), ParseError);
    CHECK_THROWS_AS(parse("a b\n"), ParseError);
    CHECK_THROWS_AS(parse("0 1 x\n"), ParseError);
    CHECK_THROWS_AS(parse("0 1 -0.5\n"), ValidationError);
  }

  TEST_CASE("constant weights") {
    std::vector<RawEdge> edges{{0, 1, 1.0}, {2, 1, 1.0}};
    auto out = assign_weights(edges, ConstantWeight{0.01});
    for (const auto& e : out) CHECK(e.weight == 0.01);
    CHECK_THROWS_AS(assign_weights(edges, ConstantWeight{1.5}), ValidationError);
    CHECK_THROWS_AS(assign_weights(edges, ConstantWeight{-0.1}), ValidationError);
  }

  TEST_CASE("weighted cascade uses 1 / in-degree") {
    std::vector<RawEdge> edges{{0, 4, 1}, {1, 4, 1}, {2, 4, 1}, {3, 4, 1}, {0, 1, 1},
                               {0, 4, 1}, {4, 4, 1}};  // duplicate and loop do not count
    auto out = assign_weights(edges, WeightedCascade{});
    for (const auto& e : out) {
      if (e.dst == 4 && e.src != 4) CHECK(e.weight == doctest::Approx(0.25));
      if (e.dst == 1) CHECK(e.weight == doctest::Approx(1.0));
    }
  }

  TEST_CASE("weight model specs") {
    CHECK(std::get<ConstantWeight>(parse_weight_model("const:0.01")).w == 0.01);
    CHECK(std::holds_alternative<WeightedCascade>(parse_weight_model("wc")));
    CHECK(std::holds_alternative<InputWeight>(parse_weight_model("input")));
    CHECK_THROWS_AS(parse_weight_model("const:"), ValidationError);
    CHECK_THROWS_AS(parse_weight_model("const:2"), ValidationError);
    CHECK_THROWS_AS(parse_weight_model("lt"), ValidationError);
    CHECK(to_string(parse_weight_model("wc")) == "wc");
  }

  TEST_CASE("csr layout") {
    std::vector<RawEdge> edges{{1, 2, 1}, {0, 2, 1}, {0, 1, 1}};
    auto g = build_csr(edges, 3);
    CHECK(to_vec(g.xadj()) == std::vector<std::uint32_t>{0, 2, 3, 3});
    CHECK(to_vec(g.adj()) == std::vector<std::uint32_t>{1, 2, 2});
    CHECK(to_vec(g.in_degree()) == std::vector<std::uint32_t>{0, 1, 2});

    auto empty = build_csr({}, 3);
    CHECK(to_vec(empty.xadj()) == std::vector<std::uint32_t>{0, 0, 0, 0});
    CHECK(empty.num_edges() == 0);
  }

  TEST_CASE("toy graph: four vertices, six edges") {
    std::ifstream in(std::filesystem::path(SKETCHIM_TEST_DATA) / "toy.txt");
    auto list = parse_edge_list(in);
    auto g = build_csr(list.edges, list.num_vertices());
    CHECK(g.num_vertices() == 4);
    CHECK(g.num_edges() == 6);
    // labels 1,2,3,4 -> ids 0,1,2,3
    CHECK(g.out_degree(0) == 2);
    CHECK(g.out_degree(1) == 2);
    CHECK(g.out_degree(2) == 1);
    CHECK(g.out_degree(3) == 1);
    CHECK(g.out_weights(2)[0] == doctest::Approx(0.6));
  }

  TEST_CASE("from_arrays rejects broken invariants") {
    CHECK_NOTHROW(CsrGraph::from_arrays({0, 1, 1}, {1}, {0.5f}));
    CHECK_THROWS_AS(CsrGraph::from_arrays({1, 1, 1}, {1}, {0.5f}), ValidationError);
    CHECK_THROWS_AS(CsrGraph::from_arrays({0, 2, 1}, {1}, {0.5f}), ValidationError);
    CHECK_THROWS_AS(CsrGraph::from_arrays({0, 1, 1}, {5}, {0.5f}), ValidationError);
    CHECK_THROWS_AS(CsrGraph::from_arrays({0, 2, 2}, {1, 1}, {0.5f, 0.5f}), ValidationError);
    CHECK_THROWS_AS(CsrGraph::from_arrays({0, 1, 1}, {1}, {1.5f}), ValidationError);
  }

  TEST_CASE("binary cache round trip") {
    auto g = build_csr(generators::erdos_renyi(50, 0.1, 3), 50);
    std::stringstream buf;
    write_csr_cache(g, buf);
    const std::string bytes = buf.str();
    CHECK(bytes.substr(0, 4) == "CSR1");
    CHECK(bytes.size() == 4 + 16 + 4 * (51 + 2 * g.num_edges()));
    auto back = read_csr_cache(buf);
    CHECK(to_vec(back.xadj()) == to_vec(g.xadj()));
    CHECK(std::equal(back.adj().begin(), back.adj().end(), g.adj().begin(), g.adj().end()));
    CHECK(std::equal(back.weight().begin(), back.weight().end(), g.weight().begin(), g.weight().end()));

    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_csr_cache(truncated), IoError);
  }

  TEST_CASE("load_graph reads edge lists and caches") {
    const auto dir = std::filesystem::temp_directory_path() / "sketchim_graph_test";
    std::filesystem::create_directories(dir);
    const auto list_path = dir / "g.txt";
    {
      std::ofstream out(list_path);
      out << "10 20 0.5\n20 30 0.25\n";
    }
    auto loaded = load_graph(list_path, {}, InputWeight{});
    CHECK(loaded.graph.num_edges() == 2);
    CHECK(loaded.labels == std::vector<std::int64_t>{10, 20, 30});
    CHECK(loaded.graph.weight()[0] == doctest::Approx(0.5));

    const auto cache_path = dir / "g.csr";
    {
      std::ofstream out(cache_path, std::ios::binary);
      write_csr_cache(loaded.graph, out);
    }
    auto cached = load_graph(cache_path, {}, ConstantWeight{0.1});
    CHECK(cached.graph.num_edges() == 2);
    CHECK(cached.graph.weight()[1] == doctest::Approx(0.1));
    CHECK(cached.labels == std::vector<std::int64_t>{0, 1, 2});

    CHECK_THROWS_AS(load_graph(dir / "missing.txt", {}, InputWeight{}), IoError);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("generators") {
    auto star = generators::star(5);
    CHECK(star.size() == 5);
    auto pl = generators::power_law(300, 600, 2.5, 1);
    CHECK(pl.size() == 1200);
    auto again = generators::power_law(300, 600, 2.5, 1);
    CHECK(pl == again);
    auto g = build_csr(pl, 300);
    CHECK(g.num_edges() == 1200);
  }
}
