#include "sketchim/hashing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

namespace sketchim {

namespace {

constexpr std::uint32_t kC1 = 0xcc9e2d51u;
constexpr std::uint32_t kC2 = 0x1b873593u;

constexpr std::uint32_t fmix32(std::uint32_t h) {
  h ^= h >> 16;
  h *= 0x85ebca6bu;
  h ^= h >> 13;
  h *= 0xc2b2ae35u;
  h ^= h >> 16;
  return h;
}

constexpr std::uint32_t mix_block(std::uint32_t k1) {
  k1 *= kC1;
  k1 = std::rotl(k1, 15);
  k1 *= kC2;
  return k1;
}

constexpr std::uint32_t fold_block(std::uint32_t h1, std::uint32_t k1) {
  h1 ^= mix_block(k1);
  h1 = std::rotl(h1, 13);
  return h1 * 5 + 0xe6546b64u;
}

std::uint32_t load_le32(const std::byte* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint32_t murmur3_32(std::span<const std::byte> data, std::uint32_t seed) {
  const std::size_t len = data.size();
  const std::size_t nblocks = len / 4;
  std::uint32_t h1 = seed;

  for (std::size_t i = 0; i < nblocks; ++i) h1 = fold_block(h1, load_le32(data.data() + 4 * i));

  const std::byte* tail = data.data() + nblocks * 4;
  std::uint32_t k1 = 0;
  switch (len & 3) {
    case 3:
      k1 ^= static_cast<std::uint32_t>(tail[2]) << 16;
      [[fallthrough]];
    case 2:
      k1 ^= static_cast<std::uint32_t>(tail[1]) << 8;
      [[fallthrough]];
    case 1:
      k1 ^= static_cast<std::uint32_t>(tail[0]);
      h1 ^= mix_block(k1);
  }

  h1 ^= static_cast<std::uint32_t>(len);
  return fmix32(h1);
}

std::uint32_t murmur3_32(std::uint32_t word, std::uint32_t seed) {
  std::uint32_t h1 = fold_block(seed, word);
  h1 ^= 4u;
  return fmix32(h1);
}

std::uint32_t edge_hash(vertex_t u, vertex_t v) {
  std::uint32_t h1 = fold_block(0u, u);
  h1 = fold_block(h1, v);
  h1 ^= 8u;
  return fmix32(h1) & kHashMax;
}

SimulationSet::SimulationSet(std::uint32_t simulations, std::uint64_t master_seed)
    : master_seed_(master_seed) {
  if (simulations == 0) throw ValidationError("number of simulations must be >= 1");
  salts_.resize(simulations);
  std::uint64_t state = master_seed;
  for (auto& salt : salts_) salt = static_cast<std::uint32_t>(splitmix64(state)) & kHashMax;
}

double sample_probability(std::uint32_t h, std::uint32_t r, const SimulationSet& sims) {
  return static_cast<double>(sims.salt(r) ^ h) / static_cast<double>(kHashMax);
}

bool edge_live(std::uint32_t h, std::uint32_t r, const SimulationSet& sims, double w) {
  return sample_probability(h, r, sims) < w;
}

std::uint32_t live_threshold(double w) {
  constexpr auto hmax = static_cast<double>(kHashMax);
  auto live = [&](std::uint64_t x) { return static_cast<double>(x) / hmax < w; };
  if (!(w > 0.0)) return 0;
  if (live(kHashMax)) return kHashMax + 1u;

  // First x that is not live; search [lo, hi] with live(lo) unknown.
  std::uint64_t lo = 0;
  std::uint64_t hi = kHashMax;
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (live(mid)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return static_cast<std::uint32_t>(lo);
}

EdgeHashCache::EdgeHashCache(const CsrGraph& graph) : hashes_(graph.num_edges()) {
  const auto xadj = graph.xadj();
  const auto adj = graph.adj();
  const vertex_t n = graph.num_vertices();
#pragma omp parallel for schedule(static)
  for (vertex_t u = 0; u < n; ++u) {
    for (auto i = xadj[u]; i < xadj[u + 1]; ++i) hashes_[i] = edge_hash(u, adj[i]);
  }
}

BiasReport bias_report(const CsrGraph& graph, const SimulationSet& sims, std::uint64_t samples,
                       std::size_t bins) {
  if (graph.num_edges() == 0) throw ValidationError("bias_report needs a graph with edges");
  if (bins == 0) throw ValidationError("bias_report needs at least one bin");

  const EdgeHashCache cache(graph);
  const std::uint64_t m = graph.num_edges();
  const std::uint64_t total = std::min<std::uint64_t>(samples, m * sims.size());

  // 2^16 bins on the top bits of the 31-bit value give the deviation at
  // exact bin edges; the coarse bins are what gets exported.
  constexpr int kFineShift = 15;
  std::vector<std::uint64_t> fine(std::size_t{1} << 16, 0);
  std::vector<std::uint64_t> coarse(bins, 0);
  std::array<std::uint64_t, 11> decile{};

  std::uint64_t drawn = 0;
  for (std::uint32_t r = 0; r < sims.size() && drawn < total; ++r) {
    for (std::uint64_t e = 0; e < m && drawn < total; ++e, ++drawn) {
      const std::uint32_t x = sims.salt(r) ^ cache[e];
      const double p = static_cast<double>(x) / static_cast<double>(kHashMax);
      ++fine[x >> kFineShift];
      ++coarse[std::min(bins - 1, static_cast<std::size_t>(p * static_cast<double>(bins)))];
      ++decile[static_cast<std::size_t>(std::ceil(p * 10.0))];
    }
  }

  BiasReport report;
  report.draws = drawn;
  std::uint64_t cumulative = decile[0];
  for (std::size_t k = 1; k <= 10; ++k) {
    cumulative += decile[k];
    report.decile_cdf[k - 1] = static_cast<double>(cumulative) / static_cast<double>(drawn);
  }

  cumulative = 0;
  for (std::size_t b = 0; b < fine.size(); ++b) {
    cumulative += fine[b];
    // Every x in bins 0..b satisfies x <= edge_x.
    const double edge_x = static_cast<double>(((b + 1) << kFineShift) - 1);
    const double x_cdf = std::min(1.0, edge_x / static_cast<double>(kHashMax));
    const double dev = std::abs(static_cast<double>(cumulative) / static_cast<double>(drawn) - x_cdf);
    report.max_deviation = std::max(report.max_deviation, dev);
  }

  const double expected = static_cast<double>(drawn) / static_cast<double>(bins);
  report.bins.reserve(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    BiasBin bin;
    bin.lo = static_cast<double>(b) / static_cast<double>(bins);
    bin.hi = static_cast<double>(b + 1) / static_cast<double>(bins);
    bin.count = coarse[b];
    bin.expected = expected;
    bin.bias = (static_cast<double>(coarse[b]) - expected) / expected;
    report.bins.push_back(bin);
  }
  return report;
}

void write_bias_csv(const BiasReport& report, std::ostream& out) {
  out << "bin_lo,bin_hi,count,expected,bias\n";
  for (const auto& b : report.bins) {
    out << b.lo << ',' << b.hi << ',' << b.count << ',' << b.expected << ',' << b.bias << '\n';
  }
}

}  // namespace sketchim
