#pragma once

#include "farcheck/verdict.hpp"
#include "farcheck/system.hpp"

namespace far {

struct BackwardConfig {
  int64_t max_cubes = 100000;  // frontier pops
  double timeout_s = 0;
  int32_t max_bad_arity = 4;
  int64_t solver_branch_budget = 1 << 16;
};

// Reference engine: fixpoint of pre-images from unsafe, fewest-procs-first,
// subsumption-reduced; Unsafe when a frontier cube intersects init. Shares
// pre_image/subsumes with the primary engine but none of the unwinding.
Verdict backward_reach(const CoreSystem& sys, const BackwardConfig& cfg = {});

}  // namespace far
