#include "farcheck/engine.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "farcheck/diag.hpp"
#include "farcheck/explicit_state.hpp"

namespace far {

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// A trace that fails to replay is an engine bug, never a user error.
void validate_replay(const CoreSystem& sys, const Trace& tr) {
  bool ok = false;
  try {
    ok = replay_trace(sys, tr, tr.nprocs);
  } catch (const IllFormedTrace& e) {
    std::ostringstream os;
    os << "counterexample ill-formed at step " << e.step << ": " << e.what();
    throw ReplayFailure(os.str());
  }
  if (!ok) throw ReplayFailure("counterexample does not reach unsafe on replay");
}

}  // namespace

std::string EngineStats::json() const {
  std::ostringstream os;
  os << "{\"verdict\":\"" << verdict << "\""
     << ",\"vertices_created\":" << vertices_created
     << ",\"edges\":" << edges
     << ",\"covers\":" << covers
     << ",\"refines\":" << refines
     << ",\"bad_propagations\":" << bad_propagations
     << ",\"solver_calls\":" << solver_calls
     << ",\"elapsed_ms\":" << elapsed_ms << "}";
  return os.str();
}

Engine::Engine(const CoreSystem& sys, EngineConfig cfg)
    : sys_(sys),
      cfg_(cfg),
      solver_(sys, store_, SolverOptions{cfg_.solver_branch_budget}) {
  verts_.push_back({World::init(), {}, -1});          // root
  verts_.push_back({World::top(), {}, -1});           // unsafe seed
  verts_.push_back({World::bottom(store_), {}, -1});  // sink
  if (!sys_.unsafe.is_false) {
    verts_[kBeta].bads.insert(store_, store_.intern(sys_.unsafe));
    bad_log_.push_back(sys_.unsafe);
  }
}

void Engine::bump_step() {
  ++stats_.steps;
  if (cfg_.max_steps > 0 && stats_.steps > cfg_.max_steps)
    throw ResourceLimit("step budget exhausted");
  if (has_deadline_ && std::chrono::steady_clock::now() > deadline_)
    throw ResourceLimit("timeout");
}

int32_t Engine::queue_key(const World& w) const {
  if (cfg_.fifo_queue) return 0;
  int32_t k = 0;
  bool first = true;
  for (CubeId id : w.negated.ids()) {
    int32_t n = store_.at(id).nprocs;
    if (first || n < k) k = n;
    first = false;
  }
  return k;
}

void Engine::push_queue(int32_t v) {
  queue_.insert({queue_key(verts_[v].world), seq_++, v});
}

Verdict Engine::run() {
  if (ran_) return verdict_;
  ran_ = true;
  auto t0 = std::chrono::steady_clock::now();
  if (cfg_.timeout_s > 0) {
    deadline_ =
        t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                 std::chrono::duration<double>(cfg_.timeout_s));
    has_deadline_ = true;
  }
  try {
    verdict_ = run_inner();
    if (verdict_.safe()) verdict_.invariant = extract_invariant();
  } catch (const ResourceLimit& e) {
    verdict_ = Verdict::inconclusive(e.what());
  } catch (const ArityLimit& e) {
    verdict_ = Verdict::inconclusive(e.what());
  }
  switch (verdict_.kind) {
    case Verdict::Kind::Safe: stats_.verdict = "SAFE"; break;
    case Verdict::Kind::Unsafe: stats_.verdict = "UNSAFE"; break;
    case Verdict::Kind::Inconclusive: stats_.verdict = "INCONCLUSIVE"; break;
  }
  stats_.edges = static_cast<int64_t>(edges_.size());
  stats_.solver_calls = solver_.calls();
  stats_.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  return verdict_;
}

Verdict Engine::run_inner() {
  // Height-zero check: an initial state may already be unsafe.
  SatResult r0 = solver_.sat_with_world(sys_.unsafe, verts_[kEps].world);
  if (r0.sat) {
    Trace tr;
    tr.nprocs = std::max(r0.model.nvalues, 1);
    validate_replay(sys_, tr);
    return Verdict::mk_unsafe(std::move(tr));
  }
  push_queue(kEps);
  const int32_t ntrans = static_cast<int32_t>(sys_.transitions.size());
  while (!queue_.empty()) {
    int32_t v = std::get<2>(*queue_.begin());
    queue_.erase(queue_.begin());
    for (int32_t t = 0; t < ntrans; ++t) {
      bump_step();
      if (enabled(solver_, verts_[v].world, sys_.transitions[t])) {
        edges_[{v, t}] = kBeta;
        if (cfg_.check_graph) check_graph_invariant();
        if (unwind(v, t)) return verdict_;
      } else {
        edges_[{v, t}] = kOmega;
        if (cfg_.check_graph) check_graph_invariant();
      }
    }
  }
  if (!verts_[kEps].bads.empty())
    throw AuditFailure("root refuted without an unsafe verdict");
  return Verdict::mk_safe();
}

bool Engine::unwind(int32_t src, int32_t tau) {
  std::vector<int32_t> tried;
  while (true) {
    if (!verts_[src].bads.empty()) return false;
    int32_t dst = edges_.at({src, tau});
    if (verts_[dst].bads.empty()) return false;
    bump_step();
    CloseResult cr = close(src, tau, dst, tried);
    if (cr.kind == CloseResult::Kind::Covered) {
      edges_[{src, tau}] = cr.vertex;
      ++stats_.covers;
      tried.push_back(dst);
      if (cfg_.check_graph) check_graph_invariant();
      continue;
    }
    if (cr.kind == CloseResult::Kind::Refined) {
      edges_[{src, tau}] = cr.vertex;
      push_queue(cr.vertex);
      if (cfg_.check_graph) check_graph_invariant();
      return false;
    }
    // Bad: pull the satisfiable pre-image disjuncts into B(src).
    ++stats_.bad_propagations;
    bool changed = false;
    for (const auto& [cube, pre] : cr.bads) {
      CubeId cid = store_.intern(cube);
      prov_.emplace(std::make_pair(src, cid),
                    BadProv{tau, dst, cr.against, pre});
      if (verts_[src].bads.insert(store_, cid)) {
        changed = true;
        bad_log_.push_back(store_.at(cid));
      }
    }
    if (cfg_.check_graph) check_graph_invariant();
    if (src == kEps) {
      // Reaching the root is the unsafe verdict: the disjunct was already
      // found satisfiable against the root world, so only build the trace.
      const auto& [c0, p0] = cr.bads.front();
      SatResult r = solver_.sat_with_world(c0, verts_[kEps].world);
      if (!r.sat) throw AuditFailure("root bad cube lost satisfiability");
      Trace tr = build_trace(c0, p0, tau, dst, cr.against, r.model);
      validate_replay(sys_, tr);
      verdict_ = Verdict::mk_unsafe(std::move(tr));
      return true;
    }
    if (changed) {
      std::vector<std::pair<int32_t, int32_t>> incoming;
      for (const auto& [key, target] : edges_)
        if (target == src) incoming.push_back(key);
      for (const auto& [u, t2] : incoming)
        if (unwind(u, t2)) return true;
    }
    return false;
  }
}

Engine::CloseResult Engine::close(int32_t src, int32_t tau, int32_t dst,
                                  const std::vector<int32_t>& tried) {
  const World& wv = verts_[src].world;
  const Transition& t = sys_.transitions[tau];
  // Cover: first existing vertex, in creation order, whose world both entails
  // the target's syntactically and absorbs the source's post.
  for (int32_t cand = 0; cand < static_cast<int32_t>(verts_.size()); ++cand) {
    if (cand == kEps || cand == kBeta || cand == kOmega || cand == dst)
      continue;
    if (std::find(tried.begin(), tried.end(), cand) != tried.end()) continue;
    if (!world_entails_syntactic(store_, verts_[cand].world,
                                 verts_[dst].world))
      continue;
    if (!post_entails(solver_, wv, t, verts_[cand].world, cfg_.max_bad_arity))
      continue;
    return {CloseResult::Kind::Covered, cand, {}, 0};
  }
  // Bad: first target cube whose pre-image meets the source world; keep every
  // satisfiable disjunct of that cube.
  for (CubeId cid : verts_[dst].bads.ids()) {
    std::vector<PreCube> pres =
        pre_image(store_.at(cid), t, cfg_.max_bad_arity);
    CloseResult res{CloseResult::Kind::Bad, -1, {}, cid};
    for (PreCube& p : pres) {
      if (!solver_.sat_with_world(p.cube, wv).sat) continue;
      Cube c = p.cube;
      res.bads.emplace_back(std::move(c), std::move(p));
    }
    if (!res.bads.empty()) return res;
  }
  // Refine: strengthen the target's world by a generalization of every bad.
  World nw = verts_[dst].world;
  for (CubeId bid : verts_[dst].bads.ids()) {
    // Copy: generalize interns candidates, which may relocate the store.
    Cube b = store_.at(bid);
    if (nw.negated.contains_subsumer(store_, b)) continue;
    Cube g = generalize(src, tau, b, nw.negated);
    nw.negated.insert(store_, store_.intern(g));
  }
  int32_t id = static_cast<int32_t>(verts_.size());
  verts_.push_back({std::move(nw), {}, dst});
  ++stats_.refines;
  ++stats_.vertices_created;
  return {CloseResult::Kind::Refined, id, {}, 0};
}

Cube Engine::generalize(int32_t src, int32_t tau, const Cube& bad,
                        const CubeSet& taken) {
  const World& wv = verts_[src].world;
  const Transition& t = sys_.transitions[tau];
  // Greedy drop in canonical literal order; every kept candidate must still
  // block the post and must not duplicate an existing refinement.
  std::vector<char> drop(bad.lits.size(), 0);
  Cube best = bad;
  size_t live = bad.lits.size();
  for (size_t i = 0; i < bad.lits.size(); ++i) {
    if (live <= 1) break;
    std::vector<Literal> lits;
    for (size_t j = 0; j < bad.lits.size(); ++j)
      if (!drop[j] && j != i) lits.push_back(bad.lits[j]);
    Cube cand = canonicalize(Cube{bad.nprocs, std::move(lits), false});
    if (cand.is_false || cand.lits.empty()) continue;
    if (taken.contains_subsumer(store_, cand)) continue;
    World single;
    single.negated.insert(store_, store_.intern(cand));
    if (!post_entails(solver_, wv, t, single, cfg_.max_bad_arity)) continue;
    drop[i] = 1;
    --live;
    best = std::move(cand);
  }
  return best;
}

Trace Engine::build_trace(const Cube& root_bad, const PreCube& root_pre,
                          int32_t tau, int32_t succ_vertex, CubeId succ_cube,
                          const SatModel& init_model) {
  Trace tr;
  int32_t pool = root_bad.nprocs;
  std::vector<int32_t> cur(root_bad.nprocs);
  for (int32_t i = 0; i < root_bad.nprocs; ++i) cur[i] = i;

  const PreCube* pre = &root_pre;
  int32_t t = tau;
  int32_t sv = succ_vertex;
  CubeId sc = succ_cube;
  while (true) {
    const Transition& tt = sys_.transitions[t];
    TraceStep step;
    step.tau = t;
    step.procs.resize(tt.nparams);
    for (int32_t j = 0; j < tt.nparams; ++j)
      step.procs[j] =
          pre->param_slot[j] >= 0 ? cur[pre->param_slot[j]] : pool++;
    tr.steps.push_back(step);
    const Cube& succ = store_.at(sc);
    std::vector<int32_t> nxt(succ.nprocs);
    for (int32_t q = 0; q < succ.nprocs; ++q) {
      if (pre->bad_to_param[q] >= 0)
        nxt[q] = step.procs[pre->bad_to_param[q]];
      else if (pre->bad_slot[q] >= 0)
        nxt[q] = cur[pre->bad_slot[q]];
      else
        nxt[q] = pool++;
    }
    cur = std::move(nxt);
    if (sv == kBeta) break;  // this step lands in unsafe
    const BadProv& bp = prov_.at({sv, sc});
    pre = &bp.pre;
    t = bp.tau;
    sv = bp.succ_vertex;
    sc = bp.succ_cube;
  }
  // Enough processes for every identity used, plus room for the initial
  // model's elsewhere placements.
  tr.nprocs = std::max({pool, init_model.nvalues, 1});
  return tr;
}

void Engine::check_graph_invariant() {
  for (const auto& [key, dst] : edges_) {
    if (dst == kBeta || dst == kOmega) continue;
    if (!verts_[dst].bads.empty()) continue;
    if (!post_entails(solver_, verts_[key.first].world,
                      sys_.transitions[key.second], verts_[dst].world,
                      cfg_.max_bad_arity)) {
      std::ostringstream os;
      os << "graph invariant: edge " << key.first << " -"
         << sys_.transitions[key.second].name << "-> " << dst
         << " is not sound";
      throw AuditFailure(os.str());
    }
  }
}

std::vector<int32_t> Engine::reachable() const {
  std::vector<char> seen(verts_.size(), 0);
  std::vector<int32_t> stack{kEps};
  seen[kEps] = 1;
  const int32_t ntrans = static_cast<int32_t>(sys_.transitions.size());
  while (!stack.empty()) {
    int32_t v = stack.back();
    stack.pop_back();
    for (int32_t t = 0; t < ntrans; ++t) {
      auto it = edges_.find({v, t});
      if (it == edges_.end()) continue;
      if (!seen[it->second]) {
        seen[it->second] = 1;
        stack.push_back(it->second);
      }
    }
  }
  std::vector<int32_t> out;
  for (int32_t v = 0; v < static_cast<int32_t>(verts_.size()); ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

std::vector<World> Engine::extract_invariant() {
  if (!ran_ || !verdict_.safe())
    throw std::logic_error("invariant extraction requires a completed safe run");
  const int32_t ntrans = static_cast<int32_t>(sys_.transitions.size());
  std::vector<World> out;
  for (int32_t v : reachable()) {
    if (v == kOmega) continue;
    const Vertex& vx = verts_[v];
    std::ostringstream who;
    who << "vertex " << v;
    if (!vx.bads.empty())
      throw AuditFailure(who.str() + " is reachable but refuted");
    if (solver_.sat_with_world(sys_.unsafe, vx.world).sat)
      throw AuditFailure(who.str() + " does not exclude unsafe");
    for (int32_t t = 0; t < ntrans; ++t) {
      auto it = edges_.find({v, t});
      if (it == edges_.end()) {
        // Only the unexpanded top world may lack edges: it absorbs any post.
        if (vx.world == World::top()) continue;
        throw AuditFailure(who.str() + " lacks an edge for " +
                           sys_.transitions[t].name);
      }
      if (it->second == kOmega) {
        if (enabled(solver_, vx.world, sys_.transitions[t]))
          throw AuditFailure(who.str() + " routes enabled " +
                             sys_.transitions[t].name + " to the sink");
      } else if (!post_entails(solver_, vx.world, sys_.transitions[t],
                               verts_[it->second].world,
                               cfg_.max_bad_arity)) {
        throw AuditFailure(who.str() + " edge " + sys_.transitions[t].name +
                           " is not sound");
      }
    }
    out.push_back(vx.world);
  }
  return out;
}

std::string Engine::export_dot(bool hide_sink) const {
  std::ostringstream os;
  os << "digraph unwinding {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=box fontname=\"monospace\"];\n";
  for (int32_t v = 0; v < static_cast<int32_t>(verts_.size()); ++v) {
    if (hide_sink && v == kOmega) continue;
    std::string name = v == kEps    ? std::string("eps")
                       : v == kBeta ? std::string("beta")
                       : v == kOmega
                           ? std::string("omega")
                           : "v" + std::to_string(v);
    std::string label = name + "\\nW: " +
                        dot_escape(render_world(sys_.syms, store_,
                                                verts_[v].world));
    if (!verts_[v].bads.empty()) {
      label += "\\nB:";
      for (CubeId id : verts_[v].bads.ids())
        label += " " + dot_escape(render_cube(sys_.syms, store_.at(id)));
    }
    os << "  n" << v << " [label=\"" << label << "\"];\n";
  }
  for (const auto& [key, dst] : edges_) {
    if (hide_sink && dst == kOmega) continue;
    os << "  n" << key.first << " -> n" << dst << " [label=\""
       << dot_escape(sys_.transitions[key.second].name) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace far
