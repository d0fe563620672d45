#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sketchim {

using vertex_t = std::uint32_t;

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input text that does not follow the expected grammar.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a precondition (range, size, domain).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class SyncMode {
  // Iterations are barrier-separated and every read observes the previous
  // iteration's registers; results do not depend on the thread count.
  strict,
  // Rows are updated in place and readers may observe updates made during
  // the current iteration. Same fixpoint, fewer iterations, no determinism
  // guarantee under threads.
  relaxed,
};

struct ExecutionPolicy {
  int threads = 0;  // 0 = all available
  SyncMode mode = SyncMode::strict;
};

/// Thread count actually used for a policy.
int resolve_threads(const ExecutionPolicy& exec);

}  // namespace sketchim
