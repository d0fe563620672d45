#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sketchim/graph.hpp"

namespace sketchim {

/// MurmurHash3 x86 32-bit, bit-exact with the reference implementation.
std::uint32_t murmur3_32(std::span<const std::byte> data, std::uint32_t seed);

/// Murmur3 of a single 32-bit word in little-endian byte order.
std::uint32_t murmur3_32(std::uint32_t word, std::uint32_t seed);

/// Upper end of the edge-hash domain; sampling probabilities are
/// (salt ^ h) / kHashMax.
inline constexpr std::uint32_t kHashMax = 0x7FFF'FFFFu;

/// Murmur3 (seed 0) of u and v as two little-endian 32-bit words, mod 2^31.
std::uint32_t edge_hash(vertex_t u, vertex_t v);

/// One 31-bit salt per simulation, derived from a single master seed.
class SimulationSet {
 public:
  SimulationSet(std::uint32_t simulations, std::uint64_t master_seed);

  std::uint32_t size() const { return static_cast<std::uint32_t>(salts_.size()); }
  std::uint64_t master_seed() const { return master_seed_; }
  std::uint32_t salt(std::uint32_t r) const { return salts_[r]; }
  std::span<const std::uint32_t> salts() const { return salts_; }

 private:
  std::uint64_t master_seed_;
  std::vector<std::uint32_t> salts_;
};

/// P(u,v)_r in [0,1].
double sample_probability(std::uint32_t h, std::uint32_t r, const SimulationSet& sims);

/// Edge is present in simulation r iff its sampling probability is
/// strictly below the edge weight.
bool edge_live(std::uint32_t h, std::uint32_t r, const SimulationSet& sims, double w);

/// Integer form of the liveness test: for every 31-bit x,
///   (x < live_threshold(w))  ==  (double(x) / kHashMax < w).
/// Division is correctly rounded and monotone in x, so the set of live x is
/// a prefix of [0, 2^31); the threshold is its exact length.
std::uint32_t live_threshold(double w);

/// h(u,v) for every CSR edge slot.
class EdgeHashCache {
 public:
  explicit EdgeHashCache(const CsrGraph& graph);

  std::span<const std::uint32_t> hashes() const { return hashes_; }
  std::uint32_t operator[](std::size_t slot) const { return hashes_[slot]; }

 private:
  std::vector<std::uint32_t> hashes_;
};

struct BiasBin {
  double lo = 0.0;
  double hi = 0.0;
  std::uint64_t count = 0;
  double expected = 0.0;
  double bias = 0.0;  // (count - expected) / expected
};

struct BiasReport {
  std::uint64_t draws = 0;
  std::array<double, 10> decile_cdf{};  // CDF at 0.1, 0.2, ..., 1.0
  double max_deviation = 0.0;           // max |CDF(x) - x|
  std::vector<BiasBin> bins;
};

/// Distribution of P(u,v)_r over edge slots x simulations (simulation-major
/// order, at most `samples` draws).
BiasReport bias_report(const CsrGraph& graph, const SimulationSet& sims, std::uint64_t samples,
                       std::size_t bins = 100);

/// Columns: bin_lo,bin_hi,count,expected,bias.
void write_bias_csv(const BiasReport& report, std::ostream& out);

}  // namespace sketchim
