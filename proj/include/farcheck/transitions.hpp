#pragma once

#include <optional>
#include <vector>

#include "farcheck/solver.hpp"

namespace far {

// One disjunct of a pre-image, with enough provenance to rebuild concrete
// process identities along a counterexample chain. Raw variables are the
// transition parameters followed by the bad cube's unmatched variables;
// normalization may prune either kind.
struct PreCube {
  Cube cube;
  // Per transition parameter: slot in cube's variables, or -1 (pruned; any
  // fresh process works).
  std::vector<int32_t> param_slot;
  // Per bad-cube variable: the parameter it was identified with, or -1.
  std::vector<int32_t> bad_to_param;
  // Per bad-cube variable: slot in cube's variables, or -1 (recover via
  // bad_to_param, else fresh).
  std::vector<int32_t> bad_slot;
};

// Exact weakest precondition of `bad` under `tau`, as a subsumption-reduced
// disjunction of cubes: enumerate partial injective identifications of bad's
// variables with tau's parameters, substitute primed state through the
// updates, conjoin the guard. Throws ArityLimit if bad.nprocs > max_arity.
std::vector<PreCube> pre_image(const Cube& bad, const Transition& tau,
                               int32_t max_arity = 4);

// W(v) ⊨τ ⊤: guard satisfiable inside w.
bool enabled(Solver& solver, const World& w, const Transition& tau);

// W(v) ∧ τ ⊨ target′: every target cube, pushed back through the updates and
// instantiated over parameters plus fresh witnesses, is unsat with guard ∧ w.
// Vacuously true when tau is disabled in w.
bool post_entails(Solver& solver, const World& w, const Transition& tau,
                  const World& target, int32_t max_arity = 4);

// Sat iff some state of w steps through tau into bad; the witness is the
// first satisfiable pre-image disjunct (with its model).
struct BadWitness {
  PreCube pre;
  SatModel model;
};
std::optional<BadWitness> post_intersects_bad(Solver& solver, const World& w,
                                              const Transition& tau,
                                              const Cube& bad,
                                              int32_t max_arity = 4);

}  // namespace far
