#include "sketchim/common.hpp"

#include <omp.h>

namespace sketchim {

int resolve_threads(const ExecutionPolicy& exec) {
  if (exec.threads > 0) return exec.threads;
  return omp_get_max_threads();
}

}  // namespace sketchim
