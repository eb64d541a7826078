#pragma once

#include "farcheck/verdict.hpp"
#include "farcheck/system.hpp"

namespace far {

// Finite instance over processes 0..nprocs-1: one value per global, one per
// (array, process). Proc-sorted values lie in 0..nprocs-1.
struct ConcreteState {
  std::vector<int32_t> globals;
  std::vector<int32_t> cells;  // arrays * nprocs, row-major by array

  bool operator==(const ConcreteState&) const = default;
};

struct ExplicitConfig {
  int64_t state_cap = 10000000;
};

struct ExplicitResult {
  Verdict verdict;
  int64_t nstates = 0;  // reachable states visited
};

// BFS over the concrete instance; Unsafe returns a shortest witness trace.
// Throws std::invalid_argument when nprocs is below the widest parameter
// list, StateLimit past the cap. Independent of the cube machinery.
ExplicitResult explicit_reach(const CoreSystem& sys, int32_t nprocs,
                              const ExplicitConfig& cfg = {});

// True iff firing the trace from some initial state of the nprocs-instance
// ends in a state satisfying unsafe. Throws IllFormedTrace when no initial
// state gets past some step (reported with the deepest step reached).
bool replay_trace(const CoreSystem& sys, const Trace& trace, int32_t nprocs);

}  // namespace far
