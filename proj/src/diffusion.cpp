#include "sketchim/diffusion.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <utility>

#include <omp.h>

namespace sketchim {

FusedGraph::FusedGraph(const CsrGraph& graph)
    : graph_(&graph), hashes_(graph), thresholds_(graph.num_edges()) {
  const auto weight = graph.weight();
  float last_w = -1.0f;
  std::uint32_t last_t = 0;
  for (std::size_t i = 0; i < weight.size(); ++i) {
    if (weight[i] != last_w) {
      last_w = weight[i];
      last_t = live_threshold(weight[i]);
    }
    thresholds_[i] = last_t;
  }

  const vertex_t n = graph.num_vertices();
  in_xadj_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (auto v : graph.adj()) ++in_xadj_[v + 1];
  for (vertex_t v = 0; v < n; ++v) in_xadj_[v + 1] += in_xadj_[v];
  in_adj_.resize(graph.num_edges());
  std::vector<std::uint32_t> cursor(in_xadj_.begin(), in_xadj_.end() - 1);
  for (vertex_t u = 0; u < n; ++u) {
    for (auto v : graph.out_neighbors(u)) in_adj_[cursor[v]++] = u;
  }
}

FrontierState::FrontierState(vertex_t n) : live_(n), flags_(n, 1) {
  for (vertex_t v = 0; v < n; ++v) live_[v] = v;
}

void FrontierState::advance(std::vector<vertex_t> next) {
  for (auto v : live_) flags_[v] = 0;
  live_ = std::move(next);
  for (auto v : live_) flags_[v] = 1;
  ++iteration_;
}

FrontierStats frontier_stats(const FrontierState& state) {
  return {state.live().size(), state.iteration()};
}

namespace {

// Merges the sampled registers of u's live out-neighbors into acc, which
// holds u's current row. Returns nonzero iff any register grew. The loop is
// branch-free over simulations so it vectorizes.
template <typename LoadRow>
Register pull_row(const FusedGraph& g, const FrontierState& frontier, vertex_t u,
                  std::span<const std::uint32_t> salts, const Register* blocked, Register* acc,
                  LoadRow&& load) {
  const auto& graph = g.graph();
  const auto xadj = graph.xadj();
  const auto adj = graph.adj();
  const auto hashes = g.hashes();
  const auto thresholds = g.thresholds();
  const std::size_t J = salts.size();
  const std::uint32_t* salt = salts.data();

  Register diff = 0;
  for (auto slot = xadj[u]; slot < xadj[u + 1]; ++slot) {
    const vertex_t v = adj[slot];
    const std::uint32_t t = thresholds[slot];
    if (t == 0 || !frontier.is_live(v)) continue;
    const Register* src = load(v);
    const std::uint32_t h = hashes[slot];
    if (blocked != nullptr) {
      for (std::size_t j = 0; j < J; ++j) {
        const Register keep = static_cast<Register>(((salt[j] ^ h) < t ? 0xFF : 0) & ~blocked[j]);
        const Register nv = std::max(acc[j], static_cast<Register>(src[j] & keep));
        diff |= static_cast<Register>(nv ^ acc[j]);
        acc[j] = nv;
      }
    } else {
      for (std::size_t j = 0; j < J; ++j) {
        const Register keep = (salt[j] ^ h) < t ? 0xFF : 0;
        const Register nv = std::max(acc[j], static_cast<Register>(src[j] & keep));
        diff |= static_cast<Register>(nv ^ acc[j]);
        acc[j] = nv;
      }
    }
  }
  return diff;
}

}  // namespace

DiffusionEngine::DiffusionEngine(const FusedGraph& graph, SketchMatrix& matrix,
                                 const SimulationSet& sims, const ReachSet& reach,
                                 DiffusionOptions options)
    : graph_(graph),
      matrix_(matrix),
      sims_(sims),
      options_(std::move(options)),
      frontier_(graph.graph().num_vertices()) {
  const vertex_t n = graph.graph().num_vertices();
  const std::uint32_t J = sims.size();
  if (matrix.num_vertices() != n || matrix.simulations() != J) {
    throw ValidationError("sketch matrix shape does not match graph and simulations");
  }
  if (reach.num_vertices() != 0 && (reach.num_vertices() != n || reach.simulations() != J)) {
    throw ValidationError("reach set shape does not match graph and simulations");
  }
  if (!(options_.eps_c >= 0.0)) throw ValidationError("eps_c must be >= 0");

  fully_blocked_.assign(n, 0);
  work_flags_.assign(n, 0);
  if (reach.num_vertices() != 0 && !reach.empty()) {
    const std::size_t stride = matrix.stride();
    blocked_.assign(static_cast<std::size_t>(n) * stride, 0);
    for (std::uint32_t j = 0; j < J; ++j) {
      const auto bits = reach.bits(j);
      for (std::size_t w = 0; w < bits.size(); ++w) {
        for (std::uint64_t word = bits[w]; word != 0; word &= word - 1) {
          const auto v = static_cast<vertex_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(word)));
          blocked_[v * stride + j] = 0xFF;
          // Already reached in this simulation: contributes nothing.
          matrix_.row(v)[j] = 0;
        }
      }
    }
    for (vertex_t v = 0; v < n; ++v) {
      const Register* row = blocked_.data() + v * stride;
      fully_blocked_[v] = std::all_of(row, row + J, [](Register b) { return b != 0; }) ? 1 : 0;
    }
  }
}

bool DiffusionEngine::should_continue() const {
  const std::size_t live = frontier_.live().size();
  const double n = static_cast<double>(graph_.graph().num_vertices());
  return live > 0 && static_cast<double>(live) > options_.eps_c * n;
}

void DiffusionEngine::collect_work() {
  for (auto u : work_) work_flags_[u] = 0;
  work_.clear();
  for (auto v : frontier_.live()) {
    for (auto u : graph_.in_neighbors(v)) {
      if (work_flags_[u] == 0 && fully_blocked_[u] == 0) {
        work_flags_[u] = 1;
        work_.push_back(u);
      }
    }
  }
  std::sort(work_.begin(), work_.end());
}

std::size_t DiffusionEngine::step() {
  collect_work();
  const int threads = resolve_threads(options_.exec);
  return options_.exec.mode == SyncMode::strict ? step_strict(threads) : step_relaxed(threads);
}

std::size_t DiffusionEngine::step_strict(int threads) {
  const std::uint32_t J = matrix_.simulations();
  const std::size_t stride = matrix_.stride();
  const auto salts = sims_.salts();
  const bool has_blocked = !blocked_.empty();

  struct Pending {
    std::vector<vertex_t> ids;
    std::vector<Register> rows;
  };
  std::vector<Pending> pending(static_cast<std::size_t>(threads));
  const auto count = static_cast<std::ptrdiff_t>(work_.size());

  // Reads see only the previous iteration's registers; changed rows are
  // staged per thread and applied after the barrier.
#pragma omp parallel num_threads(threads)
  {
    Pending& mine = pending[static_cast<std::size_t>(omp_get_thread_num())];
    std::vector<Register> acc(J);
#pragma omp for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const vertex_t u = work_[static_cast<std::size_t>(i)];
      auto row = matrix_.row(u);
      std::copy(row.begin(), row.end(), acc.begin());
      const Register* blocked = has_blocked ? blocked_.data() + u * stride : nullptr;
      const Register diff = pull_row(graph_, frontier_, u, salts, blocked, acc.data(),
                                     [&](vertex_t v) { return std::as_const(matrix_).row(v).data(); });
      if (diff != 0) {
        mine.ids.push_back(u);
        mine.rows.insert(mine.rows.end(), acc.begin(), acc.end());
      }
    }
  }

  std::vector<vertex_t> next;
  for (const auto& p : pending) {
    for (std::size_t k = 0; k < p.ids.size(); ++k) {
      auto row = matrix_.row(p.ids[k]);
      std::copy_n(p.rows.begin() + static_cast<std::ptrdiff_t>(k * J), J, row.begin());
    }
    next.insert(next.end(), p.ids.begin(), p.ids.end());
  }
  std::sort(next.begin(), next.end());
  const std::size_t changed = next.size();
  frontier_.advance(std::move(next));
  return changed;
}

std::size_t DiffusionEngine::step_relaxed(int threads) {
  const std::size_t words = matrix_.stride() / 8;
  const std::size_t stride = matrix_.stride();
  const auto salts = sims_.salts();
  const bool has_blocked = !blocked_.empty();

  std::vector<std::vector<vertex_t>> changed_ids(static_cast<std::size_t>(threads));
  const auto count = static_cast<std::ptrdiff_t>(work_.size());

  // Rows are updated in place. Each row has exactly one writer per
  // iteration (its owner); concurrent readers go through relaxed atomic
  // word loads, so a reader sees each word either before or after the
  // owner's store. Registers only grow, so a stale read merely defers a
  // merge to the next iteration.
#pragma omp parallel num_threads(threads)
  {
    auto& mine = changed_ids[static_cast<std::size_t>(omp_get_thread_num())];
    std::vector<std::uint64_t> acc(words);
    std::vector<std::uint64_t> src(words);
    auto* acc_bytes = reinterpret_cast<Register*>(acc.data());
    const auto* src_bytes = reinterpret_cast<const Register*>(src.data());
#pragma omp for schedule(dynamic, 64)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const vertex_t u = work_[static_cast<std::size_t>(i)];
      auto own = matrix_.row_words(u);
      for (std::size_t w = 0; w < words; ++w) {
        acc[w] = std::atomic_ref<std::uint64_t>(own[w]).load(std::memory_order_relaxed);
      }
      const Register* blocked = has_blocked ? blocked_.data() + u * stride : nullptr;
      const Register diff =
          pull_row(graph_, frontier_, u, salts, blocked, acc_bytes, [&](vertex_t v) {
            auto other = matrix_.row_words(v);
            for (std::size_t w = 0; w < words; ++w) {
              src[w] = std::atomic_ref<std::uint64_t>(other[w]).load(std::memory_order_relaxed);
            }
            return src_bytes;
          });
      if (diff != 0) {
        for (std::size_t w = 0; w < words; ++w) {
          std::atomic_ref<std::uint64_t>(own[w]).store(acc[w], std::memory_order_relaxed);
        }
        mine.push_back(u);
      }
    }
  }

  std::vector<vertex_t> next;
  for (const auto& ids : changed_ids) next.insert(next.end(), ids.begin(), ids.end());
  std::sort(next.begin(), next.end());
  const std::size_t changed = next.size();
  frontier_.advance(std::move(next));
  return changed;
}

DiffusionSummary DiffusionEngine::run() {
  const auto start = std::chrono::steady_clock::now();
  DiffusionSummary summary;
  while (should_continue()) {
    step();
    ++summary.iterations;
    if (options_.trace) {
      options_.trace({frontier_.iteration(), frontier_.live().size(),
                      std::chrono::steady_clock::now() - start});
    }
  }
  summary.final_live = frontier_.live().size();
  return summary;
}

DiffusionSummary simulate(const FusedGraph& graph, SketchMatrix& matrix, const SimulationSet& sims,
                          const ReachSet& reach, const DiffusionOptions& options) {
  DiffusionEngine engine(graph, matrix, sims, reach, options);
  return engine.run();
}

}  // namespace sketchim
