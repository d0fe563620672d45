#include <doctest.h>

#include <cstring>
#include <random>
#include <sstream>
#include <string_view>

#include "sketchim/generators.hpp"
#include "sketchim/hashing.hpp"

using namespace sketchim;

namespace {

std::uint32_t mm(std::string_view s, std::uint32_t seed) {
  return murmur3_32(std::as_bytes(std::span(s.data(), s.size())), seed);
}

}  // namespace

TEST_SUITE("hashing") {
  // Produced by compiling the original MurmurHash3_x86_32 reference.
  TEST_CASE("murmur3 reference vectors") {
    CHECK(mm("", 0) == 0x00000000u);
    CHECK(mm("", 1) == 0x514e28b7u);
    CHECK(mm("", 0xffffffffu) == 0x81f16f39u);
    CHECK(mm("abcd", 0) == 0x43ed676au);
    CHECK(mm("a", 0x9747b28c) == 0x7fa09ea6u);
    CHECK(mm("ab", 0x9747b28c) == 0x74875592u);
    CHECK(mm("abc", 0x9747b28c) == 0xc84a62ddu);
    CHECK(mm("aaaa", 0x9747b28c) == 0x5a97808au);
    CHECK(mm("Hello, world!", 1234) == 0xfaf6cdb3u);
    CHECK(mm("The quick brown fox jumps over the lazy dog", 0x9747b28c) == 0x2fa826cdu);
    const std::byte zeros[4]{};
    CHECK(murmur3_32(zeros, 0) == 0x2362f9deu);
    CHECK(murmur3_32(std::uint32_t{5}, 0) == 0x0e1bbb7eu);
    CHECK(mm("abcd", 7) == mm("abcd", 7));
  }

  TEST_CASE("edge hash") {
    CHECK(edge_hash(1, 2) == 0x43642e86u);
    CHECK(edge_hash(2, 1) == 0x583150c3u);
    CHECK(edge_hash(0, 0) == 0x63852afcu);
    CHECK(edge_hash(7, 3) == 0x435576d0u);
    CHECK(edge_hash(12345, 67890) == 0x34e1d726u);
    for (vertex_t u = 0; u < 200; ++u) CHECK(edge_hash(u, u + 1) <= kHashMax);
  }

  TEST_CASE("simulation salts") {
    SimulationSet a(64, 42), b(64, 42), c(64, 43);
    CHECK(a.size() == 64);
    CHECK(std::equal(a.salts().begin(), a.salts().end(), b.salts().begin()));
    CHECK_FALSE(std::equal(a.salts().begin(), a.salts().end(), c.salts().begin()));
    for (auto s : a.salts()) CHECK(s <= kHashMax);
    CHECK_THROWS_AS(SimulationSet(0, 1), ValidationError);
  }

  TEST_CASE("sample probability bounds") {
    SimulationSet sims(8, 9);
    for (std::uint32_t r = 0; r < 8; ++r) {
      CHECK(sample_probability(sims.salt(r), r, sims) == 0.0);
      CHECK(sample_probability(sims.salt(r) ^ kHashMax, r, sims) == 1.0);
      const double p = sample_probability(edge_hash(r, r + 5), r, sims);
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }

  TEST_CASE("edge_live") {
    SimulationSet sims(32, 5);
    for (std::uint32_t r = 0; r < 32; ++r) {
      const auto h = edge_hash(r, 3 * r + 1);
      CHECK_FALSE(edge_live(h, r, sims, 0.0));
      if ((sims.salt(r) ^ h) < kHashMax) CHECK(edge_live(h, r, sims, 1.0));
    }
  }

  TEST_CASE("integer threshold matches the floating-point test") {
    std::mt19937_64 rng(11);
    std::vector<double> ws{0.0, 1e-12, 0.01, 0.1, 0.25, 0.5, 0.75, 0.999999, 1.0, 1.5,
                           static_cast<double>(0.01f), static_cast<double>(0.1f),
                           static_cast<double>(1.0f / 3.0f)};
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 200; ++i) ws.push_back(u01(rng));
    for (double w : ws) {
      const std::uint64_t t = live_threshold(w);
      auto reference = [&](std::uint64_t x) { return static_cast<double>(x) / kHashMax < w; };
      for (std::int64_t d = -3; d <= 3; ++d) {
        const std::int64_t x = static_cast<std::int64_t>(t) + d;
        if (x < 0 || x > static_cast<std::int64_t>(kHashMax)) continue;
        CHECK((static_cast<std::uint64_t>(x) < t) == reference(static_cast<std::uint64_t>(x)));
      }
      for (int k = 0; k < 2000; ++k) {
        const std::uint64_t x = rng() & kHashMax;
        CHECK((x < t) == reference(x));
      }
    }
  }

  TEST_CASE("integer threshold exhaustive for w = 0.01f") {
    const double w = static_cast<double>(0.01f);
    const std::uint64_t t = live_threshold(w);
    std::uint64_t mismatches = 0;
    for (std::uint64_t x = 0; x <= kHashMax; ++x) {
      mismatches += ((x < t) != (static_cast<double>(x) / kHashMax < w)) ? 1 : 0;
    }
    CHECK(mismatches == 0);
  }

  TEST_CASE("edge hash cache matches edge_hash") {
    auto g = build_csr(generators::erdos_renyi(60, 0.1, 8), 60);
    EdgeHashCache cache(g);
    for (vertex_t u = 0; u < g.num_vertices(); ++u) {
      const auto nbrs = g.out_neighbors(u);
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        CHECK(cache[g.xadj()[u] + i] == edge_hash(u, nbrs[i]));
      }
    }
  }

  TEST_CASE("bias report") {
    auto g = build_csr(generators::erdos_renyi(200, 0.05, 4), 200);
    SimulationSet sims(256, 1);
    auto report = bias_report(g, sims, 200'000, 20);
    CHECK(report.draws == std::min<std::uint64_t>(200'000, g.num_edges() * 256ull));
    CHECK(report.decile_cdf[9] == 1.0);
    CHECK(report.bins.size() == 20);
    std::uint64_t total = 0;
    for (const auto& b : report.bins) total += b.count;
    CHECK(total == report.draws);
    CHECK(report.max_deviation < 0.01);

    std::ostringstream csv;
    write_bias_csv(report, csv);
    CHECK(csv.str().rfind("bin_lo,bin_hi,count,expected,bias\n", 0) == 0);

    CHECK_THROWS_AS(bias_report(CsrGraph{}, sims, 10), ValidationError);
  }
}
