#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "farcheck/system.hpp"

namespace far {

// A satisfying assignment. Witness k denotes process value k; proc-sorted
// globals may take values >= nwitnesses ("elsewhere" processes).
struct SatModel {
  int32_t nwitnesses = 0;
  int32_t nvalues = 0;  // distinct process values used, >= nwitnesses
  std::vector<int32_t> globals;  // per global: ctor index, or process value for proc sorts
  std::map<std::pair<int32_t, int32_t>, int32_t> cells;  // (array, process value) -> ctor

  int32_t eval(const Term& t) const;
  bool eval(const Literal& l) const;
};

struct SatResult {
  bool sat = false;
  SatModel model;  // meaningful iff sat
};

// Ground query: literals over witnesses 0..nwitnesses-1, globals, and array
// reads at those; `world` (optional) is instantiated over the witnesses by
// relevant instantiation, and its Init base pulls in the system's init
// literals at every witness tuple.
struct Query {
  int32_t nwitnesses = 0;
  std::vector<Literal> lits;
  const World* world = nullptr;
};

struct SolverOptions {
  int64_t branch_budget = 1 << 16;
};

// Chain-closure contradiction test: complementary pair, or an equality chain
// forcing two distinct constants / structurally distinct processes equal.
// True implies unsat; false is non-committal.
bool trivial_unsat(const std::vector<Literal>& lits);

// Complete decision procedure for the ground fragment: union-find over
// process terms, congruence of array reads, finite-domain propagation for
// enum values, case-splitting on world clauses and residual disequalities.
class Solver {
public:
  Solver(const CoreSystem& sys, const CubeStore& store, SolverOptions opt = {});

  SatResult sat(const Query& q);

  // sat of cube ∧ world: the cube's variables become the witnesses.
  SatResult sat_with_world(const Cube& c, const World& w);

  // lits ⇒ w over the given witnesses: every cube of ¬w, instantiated over
  // all injective maps into the witnesses, must be unsat with lits; an Init
  // base also requires lits to refute every negated instantiated init literal.
  bool entails_world(int32_t nwitnesses, const std::vector<Literal>& lits,
                     const World& w);

  int64_t calls() const { return calls_; }
  void set_dump(std::ostream* os) { dump_ = os; }
  const CubeStore& store() const { return store_; }
  const CoreSystem& system() const { return sys_; }

private:
  const CoreSystem& sys_;
  const CubeStore& store_;
  SolverOptions opt_;
  int64_t calls_ = 0;
  std::ostream* dump_ = nullptr;
};

}  // namespace far
