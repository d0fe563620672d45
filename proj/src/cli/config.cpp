#include <cmath>

#include "sketchim/cli.hpp"
#include "sketchim/graph.hpp"

namespace sketchim::cli {

namespace {

void validate_source(const GraphSource& source) {
  if (source.path.empty()) throw ValidationError("--graph is required");
  parse_weight_model(source.weights);
}

}  // namespace

void RunConfig::validate() const {
  validate_source(graph);
  if (j == 0) throw ValidationError("--j must be >= 1");
  if (threads < 0) throw ValidationError("--threads must be >= 0");
  policy().validate();
}

void EvaluateConfig::validate() const {
  validate_source(graph);
  if (seeds_path.empty()) throw ValidationError("--seeds is required");
  if (rounds == 0) throw ValidationError("--rounds must be >= 1");
  if (threads < 0) throw ValidationError("--threads must be >= 0");
}

void BiasConfig::validate() const {
  validate_source(graph);
  if (j == 0) throw ValidationError("--j must be >= 1");
  if (samples == 0) throw ValidationError("--samples must be >= 1");
  if (bins == 0) throw ValidationError("--bins must be >= 1");
}

}  // namespace sketchim::cli
