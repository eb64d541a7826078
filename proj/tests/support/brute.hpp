#pragma once

// Brute-force oracles over small finite instances. Everything here is
// exhaustive enumeration sharing no code with the solver, the symbolic
// pre-image, or the explicit-state engine; tests compare against these.

#include <cassert>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "farcheck/cube.hpp"
#include "farcheck/solver.hpp"
#include "farcheck/system.hpp"

namespace brute {

struct State {
  std::vector<int32_t> globals;
  std::vector<int32_t> cells;  // arrays * nprocs, row-major by array

  auto operator<=>(const State&) const = default;
};

struct Instance {
  const far::CoreSystem* sys = nullptr;
  int32_t nprocs = 0;

  int32_t sort_size(far::Sort s) const {
    if (s.is_proc()) return nprocs;
    return static_cast<int32_t>(sys->syms.types[s.type].ctors.size());
  }
  int32_t narrays() const {
    return static_cast<int32_t>(sys->syms.arrays.size());
  }
  int32_t cell(const State& st, int32_t arr, int32_t p) const {
    return st.cells[arr * nprocs + p];
  }
};

// Every assignment of globals and cells, in odometer order.
inline void for_each_state(const Instance& ins,
                           const std::function<void(const State&)>& fn) {
  const auto& syms = ins.sys->syms;
  std::vector<int32_t> dom;
  for (const auto& g : syms.globals) dom.push_back(ins.sort_size(g.sort));
  for (const auto& a : syms.arrays)
    for (int32_t p = 0; p < ins.nprocs; ++p)
      dom.push_back(ins.sort_size(a.elem));

  State st;
  st.globals.resize(syms.globals.size(), 0);
  st.cells.resize(syms.arrays.size() * ins.nprocs, 0);
  std::vector<int32_t> v(dom.size(), 0);
  const size_t ng = syms.globals.size();
  while (true) {
    for (size_t i = 0; i < ng; ++i) st.globals[i] = v[i];
    for (size_t i = ng; i < v.size(); ++i) st.cells[i - ng] = v[i];
    fn(st);
    size_t i = 0;
    for (; i < v.size(); ++i) {
      if (++v[i] < dom[i]) break;
      v[i] = 0;
    }
    if (i == v.size()) return;
  }
}

// env maps Param(i) to a process value; Witness(k) always denotes value k.
inline int32_t eval_term(const Instance& ins, const State& st,
                         const std::vector<int32_t>& env, const far::Term& t) {
  using K = far::Term::Kind;
  switch (t.kind) {
    case K::Const:
      return t.b;
    case K::Param:
      return env[t.a];
    case K::Witness:
      return t.a;
    case K::Global:
      return st.globals[t.a];
    case K::Read: {
      int32_t ix = 0;
      if (t.ixk == K::Param) ix = env[t.b];
      else if (t.ixk == K::Witness) ix = t.b;
      else ix = st.globals[t.b];
      return ins.cell(st, t.a, ix);
    }
  }
  return 0;
}

inline bool eval_lit(const Instance& ins, const State& st,
                     const std::vector<int32_t>& env, const far::Literal& l) {
  bool eq = eval_term(ins, st, env, l.lhs) == eval_term(ins, st, env, l.rhs);
  return l.neq ? !eq : eq;
}

// All injective tuples of `arity` pairwise-distinct process values.
inline void for_each_tuple(int32_t nprocs, int32_t arity,
                           const std::function<void(const std::vector<int32_t>&)>& fn) {
  std::vector<int32_t> tup(arity, -1);
  std::vector<char> used(nprocs, 0);
  auto rec = [&](auto&& self, int32_t i) -> void {
    if (i == arity) {
      fn(tup);
      return;
    }
    for (int32_t p = 0; p < nprocs; ++p) {
      if (used[p]) continue;
      used[p] = 1;
      tup[i] = p;
      self(self, i + 1);
      used[p] = 0;
    }
  };
  rec(rec, 0);
}

// Existential reading: some injective assignment of the cube's variables
// satisfies every literal.
inline bool holds_cube(const Instance& ins, const State& st, const far::Cube& c) {
  if (c.is_false) return false;
  if (c.nprocs > ins.nprocs) return false;
  bool found = false;
  for_each_tuple(ins.nprocs, c.nprocs, [&](const std::vector<int32_t>& env) {
    if (found) return;
    for (const far::Literal& l : c.lits)
      if (!eval_lit(ins, st, env, l)) return;
    found = true;
  });
  return found;
}

// init is a universal literal conjunction: every tuple with repetition.
inline bool holds_init(const Instance& ins, const State& st) {
  const far::CoreSystem& sys = *ins.sys;
  const int32_t k = sys.init_nparams;
  std::vector<int32_t> env(k, 0);
  while (true) {
    for (const far::Literal& l : sys.init_lits)
      if (!eval_lit(ins, st, env, l)) return false;
    int32_t i = 0;
    for (; i < k; ++i) {
      if (++env[i] < ins.nprocs) break;
      env[i] = 0;
    }
    if (i == k || k == 0) return true;
  }
}

// Successor of st firing tau with the given (pairwise distinct) parameters;
// guard already checked by the caller. Update terms may use Param(nparams)
// as the running cell index.
inline State apply(const Instance& ins, const State& st,
                   const far::Transition& tau, const std::vector<int32_t>& params) {
  std::vector<int32_t> env = params;
  env.push_back(0);  // running index slot
  State nxt = st;
  for (size_t g = 0; g < tau.global_updates.size(); ++g)
    nxt.globals[g] = eval_term(ins, st, env, tau.global_updates[g]);
  for (int32_t a = 0; a < ins.narrays(); ++a) {
    const far::ArrayUpdate& u = tau.array_updates[a];
    for (int32_t p = 0; p < ins.nprocs; ++p) {
      env.back() = p;
      int32_t val = -1;
      bool armed = false;
      for (const far::CaseArm& arm : u.arms) {
        if (params[arm.eq_param] != p) continue;
        val = eval_term(ins, st, env, arm.value);
        armed = true;
        break;
      }
      if (!armed) val = eval_term(ins, st, env, u.otherwise);
      nxt.cells[a * ins.nprocs + p] = val;
    }
  }
  return nxt;
}

inline bool guard_holds(const Instance& ins, const State& st,
                        const far::Transition& tau, const std::vector<int32_t>& params) {
  if (tau.guard.is_false) return false;
  for (const far::Literal& l : tau.guard.lits)
    if (!eval_lit(ins, st, params, l)) return false;
  return true;
}

// The one-step predecessor set of `target` under tau alone.
inline std::set<State> predecessors(const Instance& ins, const far::Cube& target,
                                    const far::Transition& tau) {
  std::set<State> preds;
  for_each_state(ins, [&](const State& st) {
    bool hit = false;
    for_each_tuple(ins.nprocs, tau.nparams, [&](const std::vector<int32_t>& ps) {
      if (hit || !guard_holds(ins, st, tau, ps)) return;
      if (holds_cube(ins, apply(ins, st, tau, ps), target)) hit = true;
    });
    if (hit) preds.insert(st);
  });
  return preds;
}

inline std::set<State> cube_states(const Instance& ins, const far::Cube& c) {
  std::set<State> out;
  for_each_state(ins, [&](const State& st) {
    if (holds_cube(ins, st, c)) out.insert(st);
  });
  return out;
}

// Ground query satisfiability by state enumeration: witnesses 0..k-1 are
// the only processes, so the instance has exactly k of them.
inline bool sat_query(const far::CoreSystem& sys, const far::Query& q) {
  assert(q.world == nullptr);
  Instance ins{&sys, q.nwitnesses};
  bool found = false;
  std::vector<int32_t> env;  // no Param terms in ground queries
  for_each_state(ins, [&](const State& st) {
    if (found) return;
    for (const far::Literal& l : q.lits)
      if (!eval_lit(ins, st, env, l)) return;
    found = true;
  });
  return found;
}

}  // namespace brute
