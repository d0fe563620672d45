#include <algorithm>
#include <bit>

#include "sketchim/diffusion.hpp"

namespace sketchim {

ReachSet::ReachSet(vertex_t n, std::uint32_t simulations)
    : n_(n), j_(simulations), words_per_sim_((static_cast<std::size_t>(n) + 63) / 64) {
  words_.assign(words_per_sim_ * simulations, 0);
}

std::size_t ReachSet::count(std::uint32_t j) const {
  std::size_t total = 0;
  for (auto w : bits(j)) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

bool ReachSet::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

void ReachSet::clear() { std::fill(words_.begin(), words_.end(), 0); }

}  // namespace sketchim
