#pragma once

#include <string>
#include <utility>
#include <vector>

#include "farcheck/backward.hpp"
#include "farcheck/engine.hpp"
#include "farcheck/explicit_state.hpp"

namespace far {

struct DiffReport {
  Verdict far_verdict;
  Verdict backward_verdict;
  std::vector<std::pair<int32_t, Verdict>> explicit_verdicts;  // by N
  bool consistent = true;
  std::vector<std::string> violations;
};

// The soundness triangle, as a pure judgment over verdicts: FAR and backward
// must agree when both are conclusive; FAR-Safe forces explicit-Safe at every
// N; explicit-Unsafe at any N forces FAR-Unsafe. Inconclusive constrains
// nothing.
void triangle_check(DiffReport& report);

// Runs far, backward, and explicit at N = 2, 3 over one system and applies
// triangle_check. `far_override` (test hook) replaces the FAR verdict before
// checking.
DiffReport run_diff(const CoreSystem& sys, const EngineConfig& engine_cfg,
                    const Verdict* far_override = nullptr);

}  // namespace far
