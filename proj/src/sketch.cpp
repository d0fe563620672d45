#include "sketchim/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "sketchim/hashing.hpp"

namespace sketchim {

Register init_register(vertex_t v, std::uint32_t j) {
  const std::uint32_t x = murmur3_32(v, kVertexHashSeed) ^ murmur3_32(j, kSimulationHashSeed);
  return register_of(x);
}

SketchMatrix::SketchMatrix(vertex_t n, std::uint32_t simulations)
    : n_(n), j_(simulations), stride_((static_cast<std::size_t>(simulations) + 7) / 8 * 8) {
  if (simulations == 0) throw ValidationError("sketch needs at least one register per vertex");
  words_.assign(static_cast<std::size_t>(n) * (stride_ / 8), 0);
}

bool SketchMatrix::operator==(const SketchMatrix& other) const {
  return n_ == other.n_ && j_ == other.j_ && words_ == other.words_;
}

void init_vertex_registers(SketchMatrix& matrix, const ExecutionPolicy& exec) {
  const std::uint32_t J = matrix.simulations();
  std::vector<std::uint32_t> sim_hash(J);
  for (std::uint32_t j = 0; j < J; ++j) sim_hash[j] = murmur3_32(j, kSimulationHashSeed);

  const vertex_t n = matrix.num_vertices();
#pragma omp parallel for schedule(static) num_threads(resolve_threads(exec))
  for (vertex_t v = 0; v < n; ++v) {
    const std::uint32_t hv = murmur3_32(v, kVertexHashSeed);
    auto row = matrix.row(v);
    for (std::uint32_t j = 0; j < J; ++j) {
      row[j] = static_cast<Register>(std::countl_zero(hv ^ sim_hash[j]));
    }
  }
}

std::vector<Register> merge(std::span<const Register> a, std::span<const Register> b) {
  if (a.size() != b.size()) throw ValidationError("cannot merge sketches of different lengths");
  std::vector<Register> out(a.begin(), a.end());
  merge_into(out, b);
  return out;
}

void merge_into(std::span<Register> dst, std::span<const Register> src) {
  if (dst.size() != src.size()) throw ValidationError("cannot merge sketches of different lengths");
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = std::max(dst[j], src[j]);
}

double estimate_from_sum(std::uint64_t sum, std::uint32_t simulations) {
  const double mean = static_cast<double>(sum) / static_cast<double>(simulations);
  return std::exp2(mean) / kFmCorrection;
}

double estimate(std::span<const Register> regs) {
  if (regs.empty()) throw ValidationError("cannot estimate an empty sketch");
  std::uint64_t sum = 0;
  for (auto r : regs) sum += r;
  return estimate_from_sum(sum, static_cast<std::uint32_t>(regs.size()));
}

std::uint64_t merged_register_sum(std::span<const Register> a, std::span<const Register> b) {
  if (a.size() != b.size()) throw ValidationError("cannot merge sketches of different lengths");
  std::uint64_t sum = 0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += std::max(a[j], b[j]);
  return sum;
}

double estimate_merged(std::span<const Register> seed, std::span<const Register> row) {
  if (seed.empty()) throw ValidationError("cannot estimate an empty sketch");
  return estimate_from_sum(merged_register_sum(seed, row), static_cast<std::uint32_t>(seed.size()));
}

}  // namespace sketchim
