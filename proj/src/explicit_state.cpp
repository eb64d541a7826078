#include "farcheck/explicit_state.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "farcheck/diag.hpp"

namespace far {
namespace {

// Flat state: globals followed by cells, row-major by array.
using Flat = std::vector<int32_t>;

struct Inst {
  const CoreSystem* sys = nullptr;
  int32_t n = 0;  // processes

  int32_t nglobals() const {
    return static_cast<int32_t>(sys->syms.globals.size());
  }
  int32_t narrays() const {
    return static_cast<int32_t>(sys->syms.arrays.size());
  }
  int32_t cell(int32_t arr, int32_t i) const { return nglobals() + arr * n + i; }

  int32_t domain(int32_t pos) const {
    if (pos < nglobals()) {
      Sort s = sys->syms.globals[pos].sort;
      return s.is_proc() ? n : sys->syms.num_ctors(s.type);
    }
    int32_t arr = (pos - nglobals()) / n;
    return sys->syms.num_ctors(sys->syms.arrays[arr].elem.type);
  }

  // env: bound variables; env[j] for Param(j). Cell updates bind the running
  // index one slot past the parameters.
  int32_t eval(const Flat& st, const std::vector<int32_t>& env,
               const Term& t) const {
    switch (t.kind) {
      case Term::Kind::Const:
        return t.b;
      case Term::Kind::Param:
        return env.at(t.a);
      case Term::Kind::Global:
        return st[t.a];
      case Term::Kind::Read: {
        int32_t ix = t.ixk == Term::Kind::Param ? env.at(t.b)
                     : t.ixk == Term::Kind::Global
                         ? st[t.b]
                         : throw std::logic_error("witness in concrete eval");
        return st[cell(t.a, ix)];
      }
      case Term::Kind::Witness:
        break;
    }
    throw std::logic_error("witness in concrete eval");
  }

  bool holds(const Flat& st, const std::vector<int32_t>& env,
             const Literal& l) const {
    bool eq = eval(st, env, l.lhs) == eval(st, env, l.rhs);
    return l.neq ? !eq : eq;
  }

  bool holds_all(const Flat& st, const std::vector<int32_t>& env,
                 const std::vector<Literal>& lits) const {
    for (const Literal& l : lits)
      if (!holds(st, env, l)) return false;
    return true;
  }

  // Universal init: every tuple (with repetition) must satisfy every literal.
  bool initial(const Flat& st) const {
    std::vector<int32_t> env(sys->init_nparams, 0);
    while (true) {
      if (!holds_all(st, env, sys->init_lits)) return false;
      int32_t i = sys->init_nparams - 1;
      for (; i >= 0; --i) {
        if (++env[i] < n) break;
        env[i] = 0;
      }
      if (i < 0) return true;
    }
  }

  // Existential cube: some injective assignment of its variables satisfies it.
  bool sat_cube(const Flat& st, const Cube& c) const {
    if (c.is_false) return false;
    if (c.nprocs > n) return false;
    std::vector<int32_t> env(c.nprocs);
    std::vector<char> used(n, 0);
    auto rec = [&](auto&& self, int32_t i) -> bool {
      if (i == c.nprocs) return holds_all(st, env, c.lits);
      for (int32_t p = 0; p < n; ++p) {
        if (used[p]) continue;
        used[p] = 1;
        env[i] = p;
        if (self(self, i + 1)) return true;
        used[p] = 0;
      }
      return false;
    };
    return rec(rec, 0);
  }

  // Deterministic successor under tau at the given parameters (guard assumed
  // checked by the caller).
  Flat fire(const Flat& st, const Transition& tau,
            const std::vector<int32_t>& procs) const {
    Flat out = st;
    std::vector<int32_t> env = procs;
    for (int32_t g = 0; g < nglobals(); ++g)
      out[g] = eval(st, env, tau.global_updates[g]);
    env.push_back(0);  // running cell index
    for (int32_t arr = 0; arr < narrays(); ++arr) {
      const ArrayUpdate& up = tau.array_updates[arr];
      for (int32_t i = 0; i < n; ++i) {
        env[tau.nparams] = i;
        const Term* chosen = &up.otherwise;
        for (const CaseArm& arm : up.arms)
          if (procs[arm.eq_param] == i) {
            chosen = &arm.value;
            break;
          }
        out[cell(arr, i)] = eval(st, env, *chosen);
      }
    }
    return out;
  }

  // All states satisfying init, in odometer order over the flat positions.
  std::vector<Flat> initial_states() const {
    std::vector<Flat> out;
    int32_t len = nglobals() + narrays() * n;
    Flat st(len, 0);
    while (true) {
      if (initial(st)) out.push_back(st);
      int32_t i = len - 1;
      for (; i >= 0; --i) {
        if (++st[i] < domain(i)) break;
        st[i] = 0;
      }
      if (i < 0) return out;
    }
  }

  // Injective parameter tuples in lexicographic order.
  template <class F>
  void injective(int32_t arity, F&& f) const {
    std::vector<int32_t> sel(arity);
    std::vector<char> used(n, 0);
    auto rec = [&](auto&& self, int32_t i) -> bool {
      if (i == arity) return f(sel);
      for (int32_t p = 0; p < n; ++p) {
        if (used[p]) continue;
        used[p] = 1;
        sel[i] = p;
        bool stop = self(self, i + 1);
        used[p] = 0;
        if (stop) return true;
      }
      return false;
    };
    rec(rec, 0);
  }
};

int32_t required_procs(const CoreSystem& sys) {
  int32_t need = std::max<int32_t>(1, sys.unsafe.nprocs);
  for (const Transition& t : sys.transitions)
    need = std::max(need, t.nparams);
  return need;
}

}  // namespace

ExplicitResult explicit_reach(const CoreSystem& sys, int32_t nprocs,
                              const ExplicitConfig& cfg) {
  if (nprocs < required_procs(sys))
    throw std::invalid_argument(
        "instance needs at least " + std::to_string(required_procs(sys)) +
        " processes");
  Inst in{&sys, nprocs};

  std::vector<Flat> states = in.initial_states();
  std::map<Flat, int32_t> index;
  struct Parent {
    int32_t state = -1;
    int32_t tau = -1;
    std::vector<int32_t> procs;
  };
  std::vector<Parent> parents;
  std::deque<int32_t> frontier;

  auto trace_to = [&](int32_t id) {
    Trace tr;
    tr.nprocs = nprocs;
    for (int32_t cur = id; parents[cur].state >= 0; cur = parents[cur].state)
      tr.steps.push_back(TraceStep{parents[cur].tau, parents[cur].procs});
    std::reverse(tr.steps.begin(), tr.steps.end());
    return tr;
  };

  std::vector<Flat> pool;
  for (Flat& st : states) {
    if (index.count(st)) continue;
    int32_t id = static_cast<int32_t>(pool.size());
    index.emplace(st, id);
    pool.push_back(std::move(st));
    parents.push_back({});
    frontier.push_back(id);
  }

  for (int32_t id : frontier)
    if (in.sat_cube(pool[id], sys.unsafe))
      return {Verdict::mk_unsafe(trace_to(id)),
              static_cast<int64_t>(pool.size())};

  while (!frontier.empty()) {
    int32_t id = frontier.front();
    frontier.pop_front();
    for (int32_t ti = 0; ti < static_cast<int32_t>(sys.transitions.size());
         ++ti) {
      const Transition& tau = sys.transitions[ti];
      if (tau.guard.is_false) continue;
      bool found_unsafe = false;
      Trace unsafe_trace;
      in.injective(tau.nparams, [&](const std::vector<int32_t>& procs) {
        if (!in.holds_all(pool[id], procs, tau.guard.lits)) return false;
        Flat next = in.fire(pool[id], tau, procs);
        auto it = index.find(next);
        if (it != index.end()) return false;
        if (static_cast<int64_t>(pool.size()) >= cfg.state_cap)
          throw StateLimit("explicit state cap exceeded");
        int32_t nid = static_cast<int32_t>(pool.size());
        index.emplace(next, nid);
        pool.push_back(std::move(next));
        parents.push_back({id, ti, procs});
        if (in.sat_cube(pool[nid], sys.unsafe)) {
          found_unsafe = true;
          unsafe_trace = trace_to(nid);
          return true;
        }
        frontier.push_back(nid);
        return false;
      });
      if (found_unsafe)
        return {Verdict::mk_unsafe(std::move(unsafe_trace)),
                static_cast<int64_t>(pool.size())};
    }
  }
  return {Verdict::mk_safe(), static_cast<int64_t>(pool.size())};
}

bool replay_trace(const CoreSystem& sys, const Trace& trace, int32_t nprocs) {
  Inst in{&sys, nprocs};
  for (size_t si = 0; si < trace.steps.size(); ++si) {
    const TraceStep& st = trace.steps[si];
    if (st.tau < 0 || st.tau >= static_cast<int32_t>(sys.transitions.size()))
      throw IllFormedTrace(static_cast<int>(si), "unknown transition index");
    const Transition& tau = sys.transitions[st.tau];
    if (static_cast<int32_t>(st.procs.size()) != tau.nparams)
      throw IllFormedTrace(static_cast<int>(si), "wrong parameter count for " +
                                                     tau.name);
    std::vector<char> used(nprocs, 0);
    for (int32_t p : st.procs) {
      if (p < 0 || p >= nprocs)
        throw IllFormedTrace(static_cast<int>(si),
                             "process id outside the instance");
      if (used[p])
        throw IllFormedTrace(static_cast<int>(si),
                             "repeated process id in one step");
      used[p] = 1;
    }
  }

  std::vector<Flat> runs = in.initial_states();
  size_t deepest = 0;
  bool any_full = false, any_unsafe = false;
  for (Flat st : runs) {
    size_t si = 0;
    bool alive = true;
    for (; si < trace.steps.size(); ++si) {
      const TraceStep& step = trace.steps[si];
      const Transition& tau = sys.transitions[step.tau];
      if (!in.holds_all(st, step.procs, tau.guard.lits)) {
        alive = false;
        break;
      }
      st = in.fire(st, tau, step.procs);
    }
    deepest = std::max(deepest, si);
    if (alive) {
      any_full = true;
      if (in.sat_cube(st, sys.unsafe)) {
        any_unsafe = true;
        break;
      }
    }
  }
  if (!runs.empty() && !any_full)
    throw IllFormedTrace(static_cast<int>(deepest),
                         "transition disabled in every run at this step");
  return any_unsafe;
}

}  // namespace far
