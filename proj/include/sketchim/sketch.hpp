#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "sketchim/common.hpp"

namespace sketchim {

/// One Flajolet-Martin register: a leading-zero count in 0..32.
using Register = std::uint8_t;

inline constexpr double kFmCorrection = 0.77351;

// Distinct Murmur3 seeds for the vertex and simulation-index streams.
inline constexpr std::uint32_t kVertexHashSeed = 0x9747b28cu;
inline constexpr std::uint32_t kSimulationHashSeed = 0x5bd1e995u;

inline Register register_of(std::uint32_t x) { return static_cast<Register>(std::countl_zero(x)); }

/// register_of(murmur3(v, kVertexHashSeed) ^ murmur3(j, kSimulationHashSeed)).
Register init_register(vertex_t v, std::uint32_t j);

/// n x J register matrix; the registers of one vertex are contiguous.
///
/// Rows are padded to a multiple of 8 bytes and the storage is made of
/// 64-bit words so that a row can also be read and written word-wise with
/// atomic_ref by the relaxed diffusion mode. Padding bytes stay zero.
class SketchMatrix {
 public:
  SketchMatrix() = default;
  SketchMatrix(vertex_t n, std::uint32_t simulations);

  vertex_t num_vertices() const { return n_; }
  std::uint32_t simulations() const { return j_; }
  std::size_t stride() const { return stride_; }

  std::span<Register> row(vertex_t v) { return {bytes() + v * stride_, j_}; }
  std::span<const Register> row(vertex_t v) const { return {bytes() + v * stride_, j_}; }

  /// Full padded row as 64-bit words.
  std::span<std::uint64_t> row_words(vertex_t v) {
    return std::span(words_).subspan(v * (stride_ / 8), stride_ / 8);
  }

  bool operator==(const SketchMatrix& other) const;

 private:
  Register* bytes() { return reinterpret_cast<Register*>(words_.data()); }
  const Register* bytes() const { return reinterpret_cast<const Register*>(words_.data()); }

  vertex_t n_ = 0;
  std::uint32_t j_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Sets every register to its single-vertex value (every vertex reaches
/// itself).
void init_vertex_registers(SketchMatrix& matrix, const ExecutionPolicy& exec = {});

/// Pairwise maximum; throws ValidationError on length mismatch.
std::vector<Register> merge(std::span<const Register> a, std::span<const Register> b);

/// dst[j] = max(dst[j], src[j]).
void merge_into(std::span<Register> dst, std::span<const Register> src);

/// 2^mean / 0.77351.
double estimate(std::span<const Register> regs);

/// Sum of max(a[j], b[j]); the integer behind estimate_merged.
std::uint64_t merged_register_sum(std::span<const Register> a, std::span<const Register> b);

/// estimate(merge(seed, row)) without materializing the merge.
double estimate_merged(std::span<const Register> seed, std::span<const Register> row);

/// Converts a register sum over J registers to an estimate.
double estimate_from_sum(std::uint64_t sum, std::uint32_t simulations);

/// Running union M_{S'} of the seed vertices' sketches since the last rebuild.
class SeedSketch {
 public:
  explicit SeedSketch(std::uint32_t simulations) : regs_(simulations, 0) {}

  void reset() { std::fill(regs_.begin(), regs_.end(), Register{0}); }
  void absorb(std::span<const Register> row) { merge_into(regs_, row); }
  std::span<const Register> registers() const { return regs_; }

 private:
  std::vector<Register> regs_;
};

}  // namespace sketchim
