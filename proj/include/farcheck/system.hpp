#pragma once

#include <string>
#include <vector>

#include "farcheck/ast.hpp"
#include "farcheck/cube.hpp"

namespace far {

// One arm of an array update: if the cell index equals Param(eq_param), the
// cell's next value is `value`. Arms are tested in order.
struct CaseArm {
  int32_t eq_param = 0;
  Term value;
  bool operator==(const CaseArm&) const = default;
};

// In update terms the running cell index is Param(nparams), one slot past the
// transition parameters; `otherwise` is typically the identity read at it.
struct ArrayUpdate {
  std::vector<CaseArm> arms;
  Term otherwise;
  bool operator==(const ArrayUpdate&) const = default;
};

struct Transition {
  std::string name;
  int32_t nparams = 0;
  std::vector<std::string> param_names;
  // Over Param(0..nparams-1); normalized but not canonicalized (parameter
  // identity is significant).
  Cube guard;
  std::vector<Term> global_updates;       // one per global; identity = the global itself
  std::vector<ArrayUpdate> array_updates; // one per array

  bool operator==(const Transition&) const = default;
};

struct CoreSystem {
  SymbolTable syms;
  std::string name;
  // init: universally quantified literal conjunction over
  // Param(0..init_nparams-1).
  int32_t init_nparams = 0;
  std::vector<Literal> init_lits;
  Cube unsafe;  // canonical
  std::vector<Transition> transitions;

  bool operator==(const CoreSystem&) const = default;
};

// Desugars the surface AST: simple array assignments become single-arm case
// updates, unassigned variables get identity updates, unsafe is canonicalized.
CoreSystem elaborate(const SystemAst& ast);

// Valid .fcub text; parse(print_system(s)) elaborates back to s.
std::string print_system(const CoreSystem& sys);

}  // namespace far
