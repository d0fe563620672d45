#include <doctest.h>

#include "brute_force.hpp"
#include "sketchim/diffusion.hpp"
#include "sketchim/generators.hpp"
#include "sketchim/seeder.hpp"

using namespace sketchim;

namespace {

SketchMatrix run(const CsrGraph& g, const SimulationSet& sims, const ReachSet& reach,
                 DiffusionOptions options) {
  FusedGraph fused(g);
  SketchMatrix m(g.num_vertices(), sims.size());
  init_vertex_registers(m, options.exec);
  simulate(fused, m, sims, reach, options);
  return m;
}

void check_fixed_point(const SketchMatrix& m, const std::vector<std::vector<Register>>& expect) {
  for (vertex_t v = 0; v < m.num_vertices(); ++v) {
    const auto row = m.row(v);
    CHECK(std::vector<Register>(row.begin(), row.end()) == expect[v]);
  }
}

}  // namespace

TEST_SUITE("diffusion") {
  TEST_CASE("no edges: one iteration, registers unchanged") {
    auto g = build_csr({}, 5);
    SimulationSet sims(16, 1);
    FusedGraph fused(g);
    SketchMatrix m(5, 16);
    init_vertex_registers(m);
    const SketchMatrix before = m;
    DiffusionEngine engine(fused, m, sims, {}, {0.0, {}, {}});
    auto summary = engine.run();
    CHECK(summary.iterations == 1);
    CHECK(summary.final_live == 0);
    CHECK(m == before);
  }

  TEST_CASE("certain path a -> b -> c") {
    std::vector<RawEdge> edges{{0, 1, 1.0}, {1, 2, 1.0}};
    auto g = build_csr(edges, 3);
    SimulationSet sims(32, 3);
    auto m = run(g, sims, {}, {0.0, {}, {}});
    for (std::uint32_t j = 0; j < 32; ++j) {
      // Under w = 1 an edge is absent only when salt ^ h == h_max.
      const Register r0 = init_register(0, j), r1 = init_register(1, j), r2 = init_register(2, j);
      CHECK(m.row(2)[j] == r2);
      CHECK(m.row(1)[j] == std::max(r1, r2));
      CHECK(m.row(0)[j] == std::max({r0, r1, r2}));
    }
  }

  TEST_CASE("fixed point matches brute force") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      auto g = testing::random_graph(60, 0.06, seed);
      SimulationSet sims(24, seed + 100);
      for (auto mode : {SyncMode::strict, SyncMode::relaxed}) {
        auto m = run(g, sims, {}, {0.0, {1, mode}, {}});
        check_fixed_point(m, testing::fixed_point(g, sims, nullptr));
      }
    }
  }

  TEST_CASE("fixed point with blocked vertices matches brute force") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      auto g = testing::random_graph(50, 0.08, seed + 20);
      SimulationSet sims(16, seed);
      FusedGraph fused(g);
      const std::vector<vertex_t> seeds{0, 7};
      auto reach = exact_reach(fused, seeds, sims).reach;
      for (auto mode : {SyncMode::strict, SyncMode::relaxed}) {
        auto m = run(g, sims, reach, {0.0, {1, mode}, {}});
        check_fixed_point(m, testing::fixed_point(g, sims, &reach));
      }
    }
  }

  TEST_CASE("strict mode is identical across thread counts") {
    auto g = build_csr(generators::power_law(2000, 6000, 2.5, 3), 2000);
    SimulationSet sims(64, 9);
    auto one = run(g, sims, {}, {0.02, {1, SyncMode::strict}, {}});
    auto four = run(g, sims, {}, {0.02, {4, SyncMode::strict}, {}});
    CHECK(one == four);
  }

  TEST_CASE("frontier stats") {
    auto g = testing::random_graph(40, 0.1, 5);
    SimulationSet sims(8, 2);
    FusedGraph fused(g);
    SketchMatrix m(40, 8);
    init_vertex_registers(m);
    DiffusionEngine engine(fused, m, sims, {}, {0.0, {}, {}});
    auto stats = frontier_stats(engine.frontier());
    CHECK(stats.live_count == 40);
    CHECK(stats.iteration == 0);
    engine.run();
    stats = frontier_stats(engine.frontier());
    CHECK(stats.live_count == 0);
    CHECK(stats.iteration >= 1);
  }

  TEST_CASE("early exit threshold") {
    auto g = build_csr(generators::power_law(3000, 9000, 2.5, 4), 3000);
    SimulationSet sims(32, 1);
    std::vector<std::size_t> live;
    DiffusionOptions options{0.05, {}, [&](const DiffusionTrace& t) { live.push_back(t.live_count); }};
    FusedGraph fused(g);
    SketchMatrix m(3000, 32);
    init_vertex_registers(m);
    auto summary = simulate(fused, m, sims, {}, options);
    REQUIRE(!live.empty());
    CHECK(live.size() == summary.iterations);
    CHECK(static_cast<double>(live.back()) <= 0.05 * 3000);
    for (std::size_t i = 0; i + 1 < live.size(); ++i) CHECK(static_cast<double>(live[i]) > 0.05 * 3000);
  }

  TEST_CASE("shape checks") {
    auto g = build_csr({}, 4);
    SimulationSet sims(8, 1);
    FusedGraph fused(g);
    SketchMatrix wrong(5, 8);
    CHECK_THROWS_AS(DiffusionEngine(fused, wrong, sims, {}, {}), ValidationError);
    SketchMatrix m(4, 8);
    CHECK_THROWS_AS(DiffusionEngine(fused, m, sims, ReachSet(4, 4), {}), ValidationError);
    CHECK_THROWS_AS(DiffusionEngine(fused, m, sims, {}, {-1.0, {}, {}}), ValidationError);
  }

  TEST_CASE("fused liveness agrees with edge_live") {
    auto g = testing::random_graph(80, 0.05, 17);
    SimulationSet sims(40, 4);
    FusedGraph fused(g);
    for (std::size_t slot = 0; slot < g.num_edges(); ++slot) {
      for (std::uint32_t j = 0; j < 40; ++j) {
        CHECK(fused.live(slot, sims.salt(j)) ==
              edge_live(fused.hashes()[slot], j, sims, g.weight()[slot]));
      }
    }
  }
}
