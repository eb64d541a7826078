#include "farcheck/transitions.hpp"

#include <cassert>
#include <string>
#include <utility>

#include "farcheck/diag.hpp"

namespace far {
namespace {

// Replace the running cell index (Param(cellvar)) by Param(v).
Term remap_cell(const Term& t, int32_t cellvar, int32_t v) {
  if (t.kind == Term::Kind::Param && t.a == cellvar) return Term::param(v);
  if (t.kind == Term::Kind::Read && t.ixk == Term::Kind::Param &&
      t.b == cellvar)
    return Term::read(t.a, Term::param(v));
  return t;
}

// Back-substitute one post-state term through tau's updates. `slot` maps the
// bad cube's variables into the joint space (parameters 0..nparams-1, then
// fresh slots). In that space all variables are pairwise distinct, so array
// reads resolve syntactically: an arm fires iff its parameter IS the index.
Term pre_term(const Term& t, const Transition& tau,
              const std::vector<int32_t>& slot) {
  switch (t.kind) {
    case Term::Kind::Const:
      return t;
    case Term::Kind::Param:
      return Term::param(slot.at(t.a));
    case Term::Kind::Global:
      return tau.global_updates.at(t.a);
    case Term::Kind::Read: {
      assert(t.ixk == Term::Kind::Param);
      int32_t v = slot.at(t.b);
      const ArrayUpdate& up = tau.array_updates.at(t.a);
      for (const CaseArm& arm : up.arms)
        if (arm.eq_param == v)
          return remap_cell(arm.value, tau.nparams, arm.eq_param);
      return remap_cell(up.otherwise, tau.nparams, v);
    }
    case Term::Kind::Witness:
      break;
  }
  assert(!"post-state cube mentions a ground witness");
  return t;
}

}  // namespace

std::vector<PreCube> pre_image(const Cube& bad, const Transition& tau,
                               int32_t max_arity) {
  std::vector<PreCube> out;
  if (bad.is_false || tau.guard.is_false) return out;
  if (bad.nprocs > max_arity)
    throw ArityLimit("pre-image of a " + std::to_string(bad.nprocs) +
                     "-process cube exceeds the arity limit " +
                     std::to_string(max_arity));

  const int32_t n = bad.nprocs, m = tau.nparams;
  std::vector<int32_t> match(n, -1);  // bad var -> parameter, -1 = fresh
  std::vector<char> used(m, 0);

  auto emit = [&]() {
    std::vector<int32_t> slot(n, -1);
    int32_t nvars = m;
    for (int32_t t = 0; t < n; ++t)
      slot[t] = match[t] >= 0 ? match[t] : nvars++;

    std::vector<Literal> lits;
    lits.reserve(bad.lits.size() + tau.guard.lits.size());
    for (const Literal& l : bad.lits)
      lits.push_back(Literal::make(pre_term(l.lhs, tau, slot),
                                   pre_term(l.rhs, tau, slot), l.neq));
    for (const Literal& l : tau.guard.lits) lits.push_back(l);

    NormalizeResult nr = normalize_cube(nvars, std::move(lits), true);
    if (nr.cube.is_false) return;

    PreCube pc;
    pc.cube = std::move(nr.cube);
    pc.param_slot.assign(nr.var_map.begin(), nr.var_map.begin() + m);
    pc.bad_to_param.resize(n);
    pc.bad_slot.resize(n);
    for (int32_t t = 0; t < n; ++t) {
      pc.bad_to_param[t] = match[t];
      pc.bad_slot[t] = nr.var_map[slot[t]];
    }

    // Disjunction reduction; ties keep the earlier disjunct's provenance.
    for (const PreCube& k : out)
      if (subsumes(k.cube, pc.cube)) return;
    std::vector<PreCube> kept;
    kept.reserve(out.size() + 1);
    for (PreCube& k : out)
      if (!subsumes(pc.cube, k.cube)) kept.push_back(std::move(k));
    out = std::move(kept);
    out.push_back(std::move(pc));
  };

  // Identifications enumerate per bad variable: each parameter in order,
  // then "fresh" (distinct from every parameter).
  auto rec = [&](auto&& self, int32_t t) -> void {
    if (t == n) {
      emit();
      return;
    }
    for (int32_t j = 0; j < m; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      match[t] = j;
      self(self, t + 1);
      used[j] = 0;
    }
    match[t] = -1;
    self(self, t + 1);
  };
  rec(rec, 0);
  return out;
}

bool enabled(Solver& solver, const World& w, const Transition& tau) {
  return solver.sat_with_world(tau.guard, w).sat;
}

bool post_entails(Solver& solver, const World& w, const Transition& tau,
                  const World& target, int32_t max_arity) {
  for (CubeId id : target.negated.ids())
    for (const PreCube& p : pre_image(solver.store().at(id), tau, max_arity))
      if (solver.sat_with_world(p.cube, w).sat) return false;
  return true;
}

std::optional<BadWitness> post_intersects_bad(Solver& solver, const World& w,
                                              const Transition& tau,
                                              const Cube& bad,
                                              int32_t max_arity) {
  for (PreCube& p : pre_image(bad, tau, max_arity)) {
    SatResult r = solver.sat_with_world(p.cube, w);
    if (r.sat) return BadWitness{std::move(p), std::move(r.model)};
  }
  return std::nullopt;
}

}  // namespace far
