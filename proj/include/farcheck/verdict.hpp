#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "farcheck/cube.hpp"

namespace far {

struct TraceStep {
  int32_t tau = 0;  // transition index
  std::vector<int32_t> procs;  // one process id per parameter

  bool operator==(const TraceStep&) const = default;
};

// A run: fire steps[i] with its process ids, starting from some initial
// state over nprocs processes, ending in an unsafe state.
struct Trace {
  int32_t nprocs = 0;
  std::vector<TraceStep> steps;

  bool operator==(const Trace&) const = default;
};

struct Verdict {
  enum class Kind { Safe, Unsafe, Inconclusive };
  Kind kind = Kind::Inconclusive;
  std::string reason;           // Inconclusive only
  std::vector<World> invariant; // Safe (may be empty for oracles)
  Trace trace;                  // Unsafe

  bool safe() const { return kind == Kind::Safe; }
  bool unsafe() const { return kind == Kind::Unsafe; }

  static Verdict mk_safe(std::vector<World> inv = {}) {
    return {Kind::Safe, "", std::move(inv), {}};
  }
  static Verdict mk_unsafe(Trace t) { return {Kind::Unsafe, "", {}, std::move(t)}; }
  static Verdict inconclusive(std::string reason) {
    return {Kind::Inconclusive, std::move(reason), {}, {}};
  }
};

// First stdout line of every run: SAFE, UNSAFE, or INCONCLUSIVE(reason).
std::string verdict_line(const Verdict& v);

}  // namespace far
