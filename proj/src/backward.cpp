#include "farcheck/backward.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "farcheck/diag.hpp"
#include "farcheck/explicit_state.hpp"
#include "farcheck/transitions.hpp"

namespace far {

namespace {

// How a frontier cube arose: firing tau from it reaches succ.
struct Prov {
  int32_t tau = 0;
  CubeId succ = 0;
  PreCube pre;
};

Trace rebuild(const CoreSystem& sys, const CubeStore& store,
              const std::map<CubeId, Prov>& prov, CubeId hit, CubeId root,
              const SatModel& m0) {
  Trace tr;
  const Cube& first = store.at(hit);
  int32_t pool = first.nprocs;
  std::vector<int32_t> cur(first.nprocs);
  for (int32_t i = 0; i < first.nprocs; ++i) cur[i] = i;

  CubeId id = hit;
  while (id != root) {
    const Prov& p = prov.at(id);
    const Transition& tt = sys.transitions[p.tau];
    TraceStep step;
    step.tau = p.tau;
    step.procs.resize(tt.nparams);
    for (int32_t j = 0; j < tt.nparams; ++j)
      step.procs[j] =
          p.pre.param_slot[j] >= 0 ? cur[p.pre.param_slot[j]] : pool++;
    tr.steps.push_back(step);
    const Cube& succ = store.at(p.succ);
    std::vector<int32_t> nxt(succ.nprocs);
    for (int32_t q = 0; q < succ.nprocs; ++q) {
      if (p.pre.bad_to_param[q] >= 0)
        nxt[q] = step.procs[p.pre.bad_to_param[q]];
      else if (p.pre.bad_slot[q] >= 0)
        nxt[q] = cur[p.pre.bad_slot[q]];
      else
        nxt[q] = pool++;
    }
    cur = std::move(nxt);
    id = p.succ;
  }
  tr.nprocs = std::max({pool, m0.nvalues, 1});
  return tr;
}

}  // namespace

Verdict backward_reach(const CoreSystem& sys, const BackwardConfig& cfg) {
  if (sys.unsafe.is_false) return Verdict::mk_safe();

  CubeStore store;
  Solver solver(sys, store, SolverOptions{cfg.solver_branch_budget});
  const World init = World::init();

  auto deadline = std::chrono::steady_clock::now();
  bool has_deadline = cfg.timeout_s > 0;
  if (has_deadline)
    deadline += std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(cfg.timeout_s));

  // Visited cubes are never evicted, so frontier ids stay valid; a candidate
  // subsumed by any visited member is redundant.
  std::vector<CubeId> visited;
  auto seen = [&](const Cube& c) {
    for (CubeId v : visited)
      if (subsumes(store.at(v), c)) return true;
    return false;
  };

  std::set<std::tuple<int32_t, int64_t, CubeId>> frontier;  // (procs, seq, id)
  std::map<CubeId, Prov> prov;
  int64_t seq = 0;

  const CubeId root = store.intern(sys.unsafe);
  visited.push_back(root);
  frontier.insert({sys.unsafe.nprocs, seq++, root});

  int64_t pops = 0;
  try {
    while (!frontier.empty()) {
      if (++pops > cfg.max_cubes)
        return Verdict::inconclusive("cube budget exhausted");
      if (has_deadline && std::chrono::steady_clock::now() > deadline)
        return Verdict::inconclusive("timeout");
      CubeId id = std::get<2>(*frontier.begin());
      frontier.erase(frontier.begin());

      SatResult hit = solver.sat_with_world(store.at(id), init);
      if (hit.sat) {
        Trace tr = rebuild(sys, store, prov, id, root, hit.model);
        if (!replay_trace(sys, tr, tr.nprocs))
          throw ReplayFailure("backward counterexample does not replay");
        return Verdict::mk_unsafe(std::move(tr));
      }

      for (int32_t t = 0; t < static_cast<int32_t>(sys.transitions.size());
           ++t) {
        for (PreCube& p :
             pre_image(store.at(id), sys.transitions[t], cfg.max_bad_arity)) {
          if (seen(p.cube)) continue;
          CubeId nid = store.intern(p.cube);
          visited.push_back(nid);
          frontier.insert({p.cube.nprocs, seq++, nid});
          prov.emplace(nid, Prov{t, id, std::move(p)});
        }
      }
    }
  } catch (const ResourceLimit& e) {
    return Verdict::inconclusive(e.what());
  } catch (const ArityLimit& e) {
    return Verdict::inconclusive(e.what());
  }
  return Verdict::mk_safe();
}

}  // namespace far
