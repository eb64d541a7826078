#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "farcheck/term.hpp"

namespace far {

// Existentially closed conjunction of literals over nprocs bound process
// variables Param(0..nprocs-1), implicitly pairwise distinct. Distinctness
// is structural and never stored as literals between bound variables;
// disequalities against ground witnesses may appear after substitution.
// The contradictory cube is the distinguished bottom: is_false = true,
// no literals, no variables.
struct Cube {
  int32_t nprocs = 0;
  std::vector<Literal> lits;
  bool is_false = false;

  bool is_top() const { return !is_false && nprocs == 0 && lits.empty(); }
  static Cube bottom() { return Cube{0, {}, true}; }
  static Cube top() { return Cube{0, {}, false}; }

  bool operator==(const Cube&) const = default;
};

struct NormalizeResult {
  Cube cube;
  // old bound-variable index -> new index, -1 if pruned (or cube is bottom).
  std::vector<int32_t> var_map;
};

// Literal-level cleanup shared by every cube builder: orientation, constant
// folding, structural-distinctness folding, duplicate removal, syntactic
// contradiction detection (complementary pair, equality chain forcing two
// distinct constants / bound variables / witnesses together). When
// `canonical`, additionally prunes unused bound variables and minimizes over
// all their permutations; guards and init keep their variable indices.
NormalizeResult normalize_cube(int32_t nprocs, std::vector<Literal> lits,
                               bool canonical);

inline Cube canonicalize(const Cube& c) {
  if (c.is_false) return Cube::bottom();
  return normalize_cube(c.nprocs, c.lits, true).cube;
}

// The contradiction half of normalize_cube alone, usable on ground literal
// conjunctions: complementary pair, or an equality chain forcing two distinct
// constants / bound variables / witnesses equal. True implies unsat.
bool lits_trivially_false(const std::vector<Literal>& lits);

// sigma maps every bound variable of c to a process term (Param of the
// result space or Witness). Distinctness between images that is no longer
// structural is materialized as literals; merging two bound variables
// yields bottom. Result is canonicalized over new_nprocs variables.
Cube substitute(const Cube& c, int32_t new_nprocs,
                const std::vector<Term>& sigma);

// True iff an injective mapping of general's bound variables into specific's
// takes general's literal set into a subset of specific's (so specific
// implies general). Ground terms map to themselves.
bool subsumes(const Cube& general, const Cube& specific);

// Hash-consed cube identities. Only canonical, non-bottom cubes enter.
using CubeId = int32_t;

class CubeStore {
public:
  CubeId intern(const Cube& c);
  const Cube& at(CubeId id) const { return cubes_.at(id); }
  int32_t size() const { return static_cast<int32_t>(cubes_.size()); }

private:
  std::vector<Cube> cubes_;
  std::unordered_map<std::string, CubeId> index_;
};

// Insertion-ordered, subsumption-reduced cube set. Serves two readings with
// the same reduction rule: as a disjunction (bad sets, backward frontiers)
// and as a set of negated cubes (worlds). In both, a member subsumed by
// another is redundant.
class CubeSet {
public:
  // False if the candidate was redundant; true if the set changed (candidate
  // added, possibly evicting members it subsumes).
  bool insert(const CubeStore& store, CubeId id);
  bool contains_subsumer(const CubeStore& store, const Cube& c) const;

  const std::vector<CubeId>& ids() const { return ids_; }
  bool empty() const { return ids_.empty(); }
  size_t size() const { return ids_.size(); }

  bool operator==(const CubeSet&) const = default;

private:
  std::vector<CubeId> ids_;
};

// Conjunction of a base (Init | Top) with the negations of a reduced cube
// set. Worlds are immutable in the engine: strengthen builds a new one.
struct World {
  enum class Base { Init, Top };
  Base base = Base::Top;
  CubeSet negated;

  static World top() { return World{Base::Top, {}}; }
  static World init() { return World{Base::Init, {}}; }
  static World bottom(CubeStore& store) {
    World w = top();
    w.negated.insert(store, store.intern(Cube::top()));
    return w;
  }

  bool has_init() const { return base == Base::Init; }
  // The world is syntactically false iff it negates the empty cube.
  bool is_false(const CubeStore& store) const {
    return !negated.empty() && store.at(negated.ids().front()).is_top();
  }

  bool operator==(const World&) const = default;
};

// w strengthened by the clause "not cube". No-ops (cube already subsumed by
// a member) return w unchanged.
World strengthen(CubeStore& store, const World& w, const Cube& cube);

// Syntactic entailment a => b used by the cover scan: base entailment
// (Init covers both bases, Top only Top) plus clause coverage, where each of
// b's negated cubes must be subsumed by one of a's.
bool world_entails_syntactic(const CubeStore& store, const World& a,
                             const World& b);

std::string render_cube(const SymbolTable& syms, const Cube& c);
std::string render_world(const SymbolTable& syms, const CubeStore& store,
                         const World& w);

}  // namespace far
