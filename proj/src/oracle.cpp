#include "sketchim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

#include <omp.h>

namespace sketchim {

namespace {

constexpr double kTwo32 = 4294967296.0;

// Smallest 32-bit draw that is NOT kept: draw / 2^32 < w  <=>  draw < limit.
std::vector<std::uint64_t> draw_limits(const CsrGraph& graph) {
  std::vector<std::uint64_t> limits(graph.num_edges());
  const auto weight = graph.weight();
  for (std::size_t i = 0; i < limits.size(); ++i) {
    limits[i] = static_cast<std::uint64_t>(std::ceil(static_cast<double>(weight[i]) * kTwo32));
  }
  return limits;
}

// Scratch space for one worker: live edge flags for the current sample and
// epoch-stamped visit marks.
struct Sampler {
  explicit Sampler(const CsrGraph& g) : live(g.num_edges()), mark(g.num_vertices(), 0) {}

  void sample(std::mt19937& gen, std::span<const std::uint64_t> limits) {
    for (std::size_t i = 0; i < limits.size(); ++i) live[i] = gen() < limits[i] ? 1 : 0;
  }

  std::uint32_t next_epoch() {
    if (++epoch == 0) {
      std::fill(mark.begin(), mark.end(), 0);
      epoch = 1;
    }
    return epoch;
  }

  std::vector<std::uint8_t> live;
  std::vector<std::uint32_t> mark;
  std::uint32_t epoch = 0;
  std::vector<vertex_t> queue;
};

// BFS over the sampled edges from `sources`, skipping vertices stamped with
// `stop_epoch` in `stop`. Returns the number of vertices reached.
std::size_t bfs(const CsrGraph& g, Sampler& s, std::span<const vertex_t> sources,
                const std::vector<std::uint32_t>* stop, std::uint32_t stop_epoch) {
  const auto xadj = g.xadj();
  const auto adj = g.adj();
  const std::uint32_t epoch = s.next_epoch();
  s.queue.clear();
  for (auto v : sources) {
    if (s.mark[v] != epoch) {
      s.mark[v] = epoch;
      s.queue.push_back(v);
    }
  }
  for (std::size_t head = 0; head < s.queue.size(); ++head) {
    const vertex_t u = s.queue[head];
    for (auto slot = xadj[u]; slot < xadj[u + 1]; ++slot) {
      const vertex_t v = adj[slot];
      if (s.live[slot] == 0 || s.mark[v] == epoch) continue;
      if (stop != nullptr && (*stop)[v] == stop_epoch) continue;
      s.mark[v] = epoch;
      s.queue.push_back(v);
    }
  }
  return s.queue.size();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

InfluenceScore oracle_influence(const CsrGraph& graph, std::span<const vertex_t> seeds,
                                const OracleConfig& config) {
  if (config.rounds == 0) throw ValidationError("oracle needs at least one round");
  for (auto s : seeds) {
    if (s >= graph.num_vertices()) throw ValidationError("seed vertex out of range");
  }
  InfluenceScore score;
  score.rounds = config.rounds;
  if (seeds.empty()) return score;

  const auto limits = draw_limits(graph);
  std::vector<std::uint32_t> reached(config.rounds);
  const auto rounds = static_cast<std::int64_t>(config.rounds);

#pragma omp parallel num_threads(resolve_threads(config.exec))
  {
    Sampler sampler(graph);
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t r = 0; r < rounds; ++r) {
      std::mt19937 gen(static_cast<std::mt19937::result_type>(config.rng_seed + static_cast<std::uint64_t>(r)));
      sampler.sample(gen, limits);
      reached[static_cast<std::size_t>(r)] =
          static_cast<std::uint32_t>(bfs(graph, sampler, seeds, nullptr, 0));
    }
  }

  double sum = 0.0;
  for (auto c : reached) sum += c;
  score.mean = sum / config.rounds;
  if (config.rounds > 1) {
    double ss = 0.0;
    for (auto c : reached) ss += (c - score.mean) * (c - score.mean);
    const double variance = ss / (config.rounds - 1);
    score.std_error = std::sqrt(variance / config.rounds);
  }
  return score;
}

std::vector<vertex_t> greedy_baseline(const CsrGraph& graph, std::uint32_t k,
                                      const OracleConfig& config) {
  const vertex_t n = graph.num_vertices();
  if (k > n) throw ValidationError("K exceeds the number of vertices");
  if (config.rounds == 0) throw ValidationError("greedy baseline needs at least one round");
  if (n > 50'000) {
    std::clog << "warning: greedy baseline on " << n
              << " vertices is O(K R n sigma) and may take very long\n";
  }

  const auto limits = draw_limits(graph);
  const auto xadj = graph.xadj();
  const int threads = resolve_threads(config.exec);
  std::vector<vertex_t> seeds;
  std::vector<std::uint8_t> chosen(n, 0);
  const auto rounds = static_cast<std::int64_t>(config.rounds);

  for (std::uint32_t step = 0; step < k; ++step) {
    // Marginal reach of v summed over rounds:
    //   rounds - (#rounds where v is already reached) + extra[v]
    // where extra[v] counts the vertices beyond v itself.
    std::vector<std::vector<std::int64_t>> extra(static_cast<std::size_t>(threads),
                                                 std::vector<std::int64_t>(n, 0));
    std::vector<std::vector<std::int64_t>> covered(static_cast<std::size_t>(threads),
                                                   std::vector<std::int64_t>(n, 0));
    const std::uint64_t step_seed = splitmix64(config.rng_seed ^ (0xa0761d6478bd642full * (step + 1)));

#pragma omp parallel num_threads(threads)
    {
      const auto tid = static_cast<std::size_t>(omp_get_thread_num());
      Sampler sampler(graph);
      std::vector<std::uint32_t> blocked(n, 0);
      std::uint32_t blocked_epoch = 0;
      auto& my_extra = extra[tid];
      auto& my_covered = covered[tid];

#pragma omp for schedule(dynamic, 8)
      for (std::int64_t r = 0; r < rounds; ++r) {
        std::mt19937 gen(static_cast<std::mt19937::result_type>(step_seed + static_cast<std::uint64_t>(r)));
        sampler.sample(gen, limits);

        ++blocked_epoch;
        if (!seeds.empty()) {
          bfs(graph, sampler, seeds, nullptr, 0);
          for (auto v : sampler.queue) {
            blocked[v] = blocked_epoch;
            ++my_covered[v];
          }
        }
        for (vertex_t u = 0; u < n; ++u) {
          if (blocked[u] == blocked_epoch) continue;
          bool any = false;
          for (auto slot = xadj[u]; slot < xadj[u + 1] && !any; ++slot) any = sampler.live[slot] != 0;
          if (!any) continue;
          const vertex_t src[1] = {u};
          my_extra[u] += static_cast<std::int64_t>(bfs(graph, sampler, src, &blocked, blocked_epoch)) - 1;
        }
      }
    }

    vertex_t best = n;
    std::int64_t best_gain = -1;
    for (vertex_t v = 0; v < n; ++v) {
      if (chosen[v] != 0) continue;
      std::int64_t gain = rounds;
      for (int t = 0; t < threads; ++t) {
        gain += extra[static_cast<std::size_t>(t)][v] - covered[static_cast<std::size_t>(t)][v];
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = v;
      }
    }
    chosen[best] = 1;
    seeds.push_back(best);
  }
  return seeds;
}

void write_oracle_csv_header(std::ostream& out) { out << "seed_set_size,mean,stderr,R\n"; }

void write_oracle_csv_row(std::ostream& out, std::size_t seed_set_size, const InfluenceScore& score) {
  out << seed_set_size << ',' << score.mean << ',' << score.std_error << ',' << score.rounds << '\n';
}

}  // namespace sketchim
