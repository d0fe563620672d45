#include "sketchim/seeder.hpp"

#include <cmath>
#include <limits>

#include <omp.h>

namespace sketchim {

void ErrorPolicy::validate() const {
  if (!(eps_l >= 0.0) || !(eps_g >= 0.0)) throw ValidationError("eps_l and eps_g must be >= 0");
  if (!(eps_c >= 0.0) || std::isinf(eps_c)) throw ValidationError("eps_c must be finite and >= 0");
}

std::size_t SeedResult::rebuild_count() const {
  std::size_t count = 0;
  for (const auto& s : steps) count += s.rebuilt ? 1 : 0;
  return count;
}

ReachResult exact_reach(const FusedGraph& graph, std::span<const vertex_t> seeds,
                        const SimulationSet& sims, const ExecutionPolicy& exec) {
  const auto& g = graph.graph();
  const vertex_t n = g.num_vertices();
  const std::uint32_t J = sims.size();
  for (auto s : seeds) {
    if (s >= n) throw ValidationError("seed vertex out of range");
  }

  ReachResult result{ReachSet(n, J), 0.0};
  const auto xadj = g.xadj();
  const auto adj = g.adj();
  std::uint64_t total = 0;

#pragma omp parallel num_threads(resolve_threads(exec)) reduction(+ : total)
  {
    std::vector<vertex_t> queue;
    queue.reserve(64);
#pragma omp for schedule(dynamic, 4)
    for (std::int64_t jj = 0; jj < static_cast<std::int64_t>(J); ++jj) {
      const auto j = static_cast<std::uint32_t>(jj);
      const std::uint32_t salt = sims.salt(j);
      queue.clear();
      for (auto s : seeds) {
        if (!result.reach.test(j, s)) {
          result.reach.set(j, s);
          queue.push_back(s);
        }
      }
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const vertex_t u = queue[head];
        for (auto slot = xadj[u]; slot < xadj[u + 1]; ++slot) {
          const vertex_t v = adj[slot];
          if (graph.live(slot, salt) && !result.reach.test(j, v)) {
            result.reach.set(j, v);
            queue.push_back(v);
          }
        }
      }
      total += queue.size();
    }
  }
  result.sigma = static_cast<double>(total) / static_cast<double>(J);
  return result;
}

bool should_rebuild(double e, double delta, double sigma, const ErrorPolicy& policy) {
  const double err_l =
      delta > 0.0 ? std::abs((e - delta) / delta) : std::numeric_limits<double>::infinity();
  const double err_g = std::abs((e - delta) / sigma);
  return !(err_l < policy.eps_l || err_g < policy.eps_g);
}

namespace {

struct Candidate {
  std::uint64_t sum = 0;
  vertex_t vertex = std::numeric_limits<vertex_t>::max();

  bool better_than(const Candidate& other) const {
    if (vertex == std::numeric_limits<vertex_t>::max()) return false;
    if (other.vertex == std::numeric_limits<vertex_t>::max()) return true;
    return sum != other.sum ? sum > other.sum : vertex < other.vertex;
  }
};

// argmax_v estimate(merge(seed, M_v)) over non-excluded vertices; estimate
// is monotone in the register sum, so the integer sum decides. Ties go to
// the lowest vertex id.
Candidate best_candidate(const SketchMatrix& matrix, const SeedSketch& seed,
                         std::span<const std::uint8_t> excluded, int threads) {
  const vertex_t n = matrix.num_vertices();
  std::vector<Candidate> per_thread(static_cast<std::size_t>(threads));
#pragma omp parallel num_threads(threads)
  {
    Candidate best;
#pragma omp for schedule(static)
    for (std::int64_t vv = 0; vv < static_cast<std::int64_t>(n); ++vv) {
      const auto v = static_cast<vertex_t>(vv);
      if (excluded[v] != 0) continue;
      Candidate c{merged_register_sum(seed.registers(), matrix.row(v)), v};
      if (c.better_than(best)) best = c;
    }
    per_thread[static_cast<std::size_t>(omp_get_thread_num())] = best;
  }
  Candidate best;
  for (const auto& c : per_thread) {
    if (c.better_than(best)) best = c;
  }
  return best;
}

}  // namespace

SeedResult select_seeds(const CsrGraph& graph, std::uint32_t k, const SimulationSet& sims,
                        const SeederOptions& options) {
  options.policy.validate();
  const vertex_t n = graph.num_vertices();
  if (k > n) throw ValidationError("K exceeds the number of vertices");
  SeedResult result;
  if (k == 0) return result;

  const std::uint32_t J = sims.size();
  const int threads = resolve_threads(options.exec);
  const FusedGraph fused(graph);
  DiffusionOptions diffusion{options.policy.eps_c, options.exec, options.diffusion_trace};

  SketchMatrix matrix(n, J);
  init_vertex_registers(matrix, options.exec);
  simulate(fused, matrix, sims, ReachSet{}, diffusion);
  result.simulate_passes = 1;

  SeedSketch seed_sketch(J);
  double sigma_at_rebuild = 0.0;
  std::vector<std::uint8_t> excluded(n, 0);
  std::vector<std::uint8_t> in_seeds(n, 0);

  for (std::uint32_t step = 0; step < k; ++step) {
    Candidate pick = best_candidate(matrix, seed_sketch, excluded, threads);
    if (pick.vertex == std::numeric_limits<vertex_t>::max()) {
      // Everything left is blocked in every simulation; any non-seed vertex
      // has zero marginal gain, so fall back to the lowest unused id.
      pick.vertex = 0;
      while (in_seeds[pick.vertex] != 0) ++pick.vertex;
      pick.sum = merged_register_sum(seed_sketch.registers(), matrix.row(pick.vertex));
    }
    const vertex_t s = pick.vertex;
    result.seeds.push_back(s);
    in_seeds[s] = 1;
    excluded[s] = 1;

    StepRecord rec;
    rec.vertex = s;
    rec.estimate = estimate_from_sum(pick.sum, J);
    ReachResult reach = exact_reach(fused, result.seeds, sims, options.exec);
    rec.sigma = reach.sigma;
    rec.delta = rec.sigma - sigma_at_rebuild;
    rec.err_l = rec.delta > 0.0 ? std::abs((rec.estimate - rec.delta) / rec.delta)
                                : std::numeric_limits<double>::infinity();
    rec.err_g = std::abs((rec.estimate - rec.delta) / rec.sigma);
    rec.rebuilt = should_rebuild(rec.estimate, rec.delta, rec.sigma, options.policy);

    if (!rec.rebuilt) {
      seed_sketch.absorb(matrix.row(s));
    } else if (step + 1 < k) {
      // A rebuild after the last pick cannot influence the result, so only
      // the decision is recorded for it.
      init_vertex_registers(matrix, options.exec);
      simulate(fused, matrix, sims, reach.reach, diffusion);
      ++result.simulate_passes;
      seed_sketch.reset();
      sigma_at_rebuild = rec.sigma;
      for (vertex_t v = 0; v < n; ++v) {
        if (excluded[v] != 0) continue;
        bool all = true;
        for (std::uint32_t j = 0; j < J && all; ++j) all = reach.reach.test(j, v);
        if (all) excluded[v] = 1;
      }
    }

    result.steps.push_back(rec);
    result.sigma_final = rec.sigma;
    if (options.on_step) options.on_step(step + 1, rec);
  }
  return result;
}

}  // namespace sketchim
