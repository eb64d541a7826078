#include "farcheck/solver.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "farcheck/cube.hpp"
#include "farcheck/diag.hpp"

namespace far {

int32_t SatModel::eval(const Term& t) const {
  switch (t.kind) {
    case Term::Kind::Const:
      return t.b;
    case Term::Kind::Witness:
      return t.a;
    case Term::Kind::Global:
      return globals.at(t.a);
    case Term::Kind::Read:
      return cells.at({t.a, eval(t.index())});
    case Term::Kind::Param:
      break;
  }
  throw std::logic_error("model evaluation of a bound variable");
}

bool SatModel::eval(const Literal& l) const {
  bool eq = eval(l.lhs) == eval(l.rhs);
  return l.neq ? !eq : eq;
}

bool trivial_unsat(const std::vector<Literal>& lits) {
  return lits_trivially_false(lits);
}

namespace {

enum class Tri { True, False, Unknown };

Tri flip(Tri t, bool neq) {
  if (!neq) return t;
  if (t == Tri::True) return Tri::False;
  if (t == Tri::False) return Tri::True;
  return Tri::Unknown;
}

// Finite-domain node for an enum-valued position (enum global or array cell).
// allowed is the bitmask of constructors still possible; a singleton mask is
// a decided value.
struct ValNode {
  int32_t type = 0;
  uint32_t allowed = 0;
  int32_t parent = 0;
};

// The mutable search state, copied whole on every branch. Process nodes are
// witnesses 0..k-1 followed by the proc-sorted globals; witnesses never merge
// with each other, so the root of any class containing witness w is w.
struct State {
  std::vector<int32_t> pparent;
  std::vector<std::pair<int32_t, int32_t>> pdiseq;  // proc node pairs
  std::vector<ValNode> vals;
  std::vector<std::pair<int32_t, int32_t>> vdiseq;  // val node pairs
  std::map<std::pair<int32_t, int32_t>, int32_t> cells;  // (array, proc root)
  std::vector<uint8_t> done;  // per clause: satisfied in this state
};

// Immutable per-call context.
struct Ctx {
  const CoreSystem* sys = nullptr;
  int32_t k = 0;                 // witnesses in scope
  std::vector<int32_t> pnode;    // global id -> proc node, -1 if enum-sorted
  std::vector<int32_t> gnode;    // global id -> val node, -1 if proc-sorted
  std::vector<std::vector<Literal>> clauses;  // ground disjunctions
  std::vector<Literal> units;    // ground conjunction: query lits + init base
};

int32_t pfind(State& s, int32_t x) {
  while (s.pparent[x] != x) {
    s.pparent[x] = s.pparent[s.pparent[x]];
    x = s.pparent[x];
  }
  return x;
}

int32_t vfind(State& s, int32_t x) {
  while (s.vals[x].parent != x) {
    s.vals[x].parent = s.vals[s.vals[x].parent].parent;
    x = s.vals[x].parent;
  }
  return x;
}

uint32_t full_mask(const SymbolTable& syms, int32_t type) {
  return (1u << syms.num_ctors(type)) - 1;
}

int32_t cell_node(const Ctx& cx, State& s, int32_t arr, int32_t proc) {
  int32_t r = pfind(s, proc);
  auto it = s.cells.find({arr, r});
  if (it != s.cells.end()) return it->second;
  int32_t type = cx.sys->syms.arrays.at(arr).elem.type;
  assert(type >= 0);  // proc-sorted arrays are rejected by the frontend
  int32_t id = static_cast<int32_t>(s.vals.size());
  s.vals.push_back(ValNode{type, full_mask(cx.sys->syms, type), id});
  s.cells.emplace(std::pair{arr, r}, id);
  return id;
}

struct TRef {
  enum K { Proc, Val, Cst } k = Cst;
  int32_t x = 0;  // node id, or constructor index for Cst
};

TRef classify(const Ctx& cx, State& s, const Term& t) {
  switch (t.kind) {
    case Term::Kind::Const:
      return {TRef::Cst, t.b};
    case Term::Kind::Witness:
      return {TRef::Proc, t.a};
    case Term::Kind::Global:
      if (cx.pnode[t.a] >= 0) return {TRef::Proc, cx.pnode[t.a]};
      return {TRef::Val, cx.gnode[t.a]};
    case Term::Kind::Read: {
      int32_t ix;
      if (t.ixk == Term::Kind::Witness) {
        ix = t.b;
      } else {
        assert(t.ixk == Term::Kind::Global && cx.pnode[t.b] >= 0);
        ix = cx.pnode[t.b];
      }
      return {TRef::Val, cell_node(cx, s, t.a, ix)};
    }
    case Term::Kind::Param:
      break;
  }
  throw std::logic_error("ground query contains a bound variable");
}

bool shrink(State& s, int32_t node, uint32_t mask);

// A class just became a singleton: its value is forbidden across every
// disequality edge touching it. Idempotent, so safe to re-run after merges.
bool cascade_singleton(State& s, int32_t r) {
  uint32_t a = s.vals[r].allowed;
  for (size_t i = 0; i < s.vdiseq.size(); ++i) {
    int32_t ru = vfind(s, s.vdiseq[i].first);
    int32_t rv = vfind(s, s.vdiseq[i].second);
    if (ru == rv) return false;
    if (ru == r && !shrink(s, rv, ~a)) return false;
    if (rv == r && !shrink(s, ru, ~a)) return false;
  }
  return true;
}

bool shrink(State& s, int32_t node, uint32_t mask) {
  int32_t r = vfind(s, node);
  uint32_t na = s.vals[r].allowed & mask;
  if (na == s.vals[r].allowed) return true;
  if (na == 0) return false;
  s.vals[r].allowed = na;
  if (std::popcount(na) == 1) return cascade_singleton(s, r);
  return true;
}

bool vunion(State& s, int32_t x, int32_t y) {
  int32_t rx = vfind(s, x), ry = vfind(s, y);
  if (rx == ry) return true;
  assert(s.vals[rx].type == s.vals[ry].type);
  for (auto [u, v] : s.vdiseq) {
    int32_t ru = vfind(s, u), rv = vfind(s, v);
    if ((ru == rx && rv == ry) || (ru == ry && rv == rx)) return false;
  }
  if (rx > ry) std::swap(rx, ry);
  uint32_t inter = s.vals[rx].allowed & s.vals[ry].allowed;
  if (inter == 0) return false;
  s.vals[ry].parent = rx;
  s.vals[rx].allowed = inter;
  if (std::popcount(inter) == 1 && !cascade_singleton(s, rx)) return false;
  return true;
}

bool punion(const Ctx& cx, State& s, int32_t x, int32_t y) {
  int32_t rx = pfind(s, x), ry = pfind(s, y);
  if (rx == ry) return true;
  if (rx > ry) std::swap(rx, ry);
  if (ry < cx.k) return false;  // two distinct witnesses
  s.pparent[ry] = rx;
  for (auto [u, v] : s.pdiseq)
    if (pfind(s, u) == pfind(s, v)) return false;
  // Congruence: cells of the two classes collapse per array.
  std::vector<std::pair<int32_t, int32_t>> moved;
  for (auto it = s.cells.begin(); it != s.cells.end();) {
    if (it->first.second == ry) {
      moved.push_back({it->first.first, it->second});
      it = s.cells.erase(it);
    } else {
      ++it;
    }
  }
  for (auto [arr, node] : moved) {
    auto it = s.cells.find({arr, rx});
    if (it == s.cells.end()) {
      s.cells.emplace(std::pair{arr, rx}, node);
    } else if (!vunion(s, it->second, node)) {
      return false;
    }
  }
  return true;
}

bool has_pdiseq(State& s, int32_t ra, int32_t rb) {
  for (auto [u, v] : s.pdiseq) {
    int32_t ru = pfind(s, u), rv = pfind(s, v);
    if ((ru == ra && rv == rb) || (ru == rb && rv == ra)) return true;
  }
  return false;
}

bool has_vdiseq(State& s, int32_t ra, int32_t rb) {
  for (auto [u, v] : s.vdiseq) {
    int32_t ru = vfind(s, u), rv = vfind(s, v);
    if ((ru == ra && rv == rb) || (ru == rb && rv == ra)) return true;
  }
  return false;
}

// Make the literal hold. False means the state became contradictory.
bool assert_literal(const Ctx& cx, State& s, const Literal& l) {
  TRef a = classify(cx, s, l.lhs), b = classify(cx, s, l.rhs);
  if (a.k == TRef::Cst && b.k == TRef::Cst) return (a.x == b.x) != l.neq;
  if (a.k == TRef::Proc && b.k == TRef::Proc) {
    if (!l.neq) return punion(cx, s, a.x, b.x);
    int32_t ra = pfind(s, a.x), rb = pfind(s, b.x);
    if (ra == rb) return false;
    if (ra < cx.k && rb < cx.k) return true;  // structurally distinct
    s.pdiseq.push_back({a.x, b.x});
    return true;
  }
  if (a.k == TRef::Val && b.k == TRef::Val) {
    if (!l.neq) return vunion(s, a.x, b.x);
    int32_t ra = vfind(s, a.x), rb = vfind(s, b.x);
    if (ra == rb) return false;
    s.vdiseq.push_back({a.x, b.x});
    uint32_t aa = s.vals[ra].allowed, ab = s.vals[rb].allowed;
    if (std::popcount(aa) == 1 && !shrink(s, b.x, ~aa)) return false;
    if (std::popcount(ab) == 1 && !shrink(s, a.x, ~ab)) return false;
    return true;
  }
  if (a.k == TRef::Val && b.k == TRef::Cst)
    return shrink(s, a.x, l.neq ? ~(1u << b.x) : (1u << b.x));
  if (a.k == TRef::Cst && b.k == TRef::Val)
    return shrink(s, b.x, l.neq ? ~(1u << a.x) : (1u << a.x));
  throw std::logic_error("sort mismatch in ground literal");
}

// Sound three-valued evaluation: True/False only when the state entails it.
Tri eval_literal(const Ctx& cx, State& s, const Literal& l) {
  TRef a = classify(cx, s, l.lhs), b = classify(cx, s, l.rhs);
  if (a.k == TRef::Cst && b.k == TRef::Cst)
    return flip(a.x == b.x ? Tri::True : Tri::False, l.neq);
  if (a.k == TRef::Proc && b.k == TRef::Proc) {
    int32_t ra = pfind(s, a.x), rb = pfind(s, b.x);
    if (ra == rb) return flip(Tri::True, l.neq);
    if ((ra < cx.k && rb < cx.k) || has_pdiseq(s, ra, rb))
      return flip(Tri::False, l.neq);
    return Tri::Unknown;
  }
  if (a.k == TRef::Val && b.k == TRef::Val) {
    int32_t ra = vfind(s, a.x), rb = vfind(s, b.x);
    if (ra == rb) return flip(Tri::True, l.neq);
    uint32_t aa = s.vals[ra].allowed, ab = s.vals[rb].allowed;
    if ((aa & ab) == 0 || has_vdiseq(s, ra, rb)) return flip(Tri::False, l.neq);
    if (aa == ab && std::popcount(aa) == 1) return flip(Tri::True, l.neq);
    return Tri::Unknown;
  }
  if (a.k == TRef::Cst) std::swap(a, b);
  if (a.k == TRef::Val && b.k == TRef::Cst) {
    uint32_t aa = s.vals[vfind(s, a.x)].allowed;
    uint32_t bit = 1u << b.x;
    if (!(aa & bit)) return flip(Tri::False, l.neq);
    if (aa == bit) return flip(Tri::True, l.neq);
    return Tri::Unknown;
  }
  throw std::logic_error("sort mismatch in ground literal");
}

// Unit propagation to fixpoint. False means conflict.
bool propagate(const Ctx& cx, State& s) {
  bool progress = true;
  while (progress) {
    progress = false;
    for (size_t ci = 0; ci < cx.clauses.size(); ++ci) {
      if (s.done[ci]) continue;
      const auto& cl = cx.clauses[ci];
      int unknown = -1, nunknown = 0;
      bool satisfied = false;
      for (size_t j = 0; j < cl.size(); ++j) {
        Tri t = eval_literal(cx, s, cl[j]);
        if (t == Tri::True) {
          satisfied = true;
          break;
        }
        if (t == Tri::Unknown) {
          ++nunknown;
          unknown = static_cast<int>(j);
        }
      }
      if (satisfied) {
        s.done[ci] = 1;
        progress = true;
        continue;
      }
      if (nunknown == 0) return false;
      if (nunknown == 1) {
        if (!assert_literal(cx, s, cl[unknown])) return false;
        s.done[ci] = 1;
        progress = true;
      }
    }
  }
  return true;
}

int32_t decided(State& s, const std::vector<int32_t>& color, int32_t root) {
  uint32_t a = s.vals[root].allowed;
  if (std::popcount(a) == 1) return std::countr_zero(a);
  return color[root];
}

bool color_rec(State& s, const std::vector<int32_t>& roots,
               std::vector<int32_t>& color, size_t i, int64_t& budget) {
  if (i == roots.size()) return true;
  int32_t r = roots[i];
  uint32_t allowed = s.vals[r].allowed;
  for (int32_t c = 0; c < 32; ++c) {
    if (!(allowed >> c & 1)) continue;
    if (--budget < 0) throw ResourceLimit("solver branch budget exhausted");
    bool ok = true;
    for (auto [u, v] : s.vdiseq) {
      int32_t ru = vfind(s, u), rv = vfind(s, v);
      int32_t other = ru == r ? rv : rv == r ? ru : -1;
      if (other >= 0 && decided(s, color, other) == c) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    color[r] = c;
    if (color_rec(s, roots, color, i + 1, budget)) return true;
    color[r] = -1;
  }
  return false;
}

SatModel extract(const Ctx& cx, State& s, const std::vector<int32_t>& color) {
  SatModel m;
  m.nwitnesses = cx.k;
  // Witness classes keep their own index as root; proc-sorted globals not
  // merged into any witness each get a fresh "elsewhere" value.
  std::vector<int32_t> pv(s.pparent.size(), -1);
  std::vector<int32_t> owner;
  for (int32_t w = 0; w < cx.k; ++w) {
    pv[w] = w;
    owner.push_back(w);
  }
  const auto& syms = cx.sys->syms;
  for (int32_t g = 0; g < static_cast<int32_t>(syms.globals.size()); ++g) {
    if (cx.pnode[g] < 0) continue;
    int32_t r = pfind(s, cx.pnode[g]);
    if (pv[r] < 0) {
      pv[r] = static_cast<int32_t>(owner.size());
      owner.push_back(r);
    }
  }
  m.nvalues = static_cast<int32_t>(owner.size());
  for (int32_t g = 0; g < static_cast<int32_t>(syms.globals.size()); ++g) {
    if (cx.pnode[g] >= 0) {
      m.globals.push_back(pv[pfind(s, cx.pnode[g])]);
    } else {
      m.globals.push_back(decided(s, color, vfind(s, cx.gnode[g])));
    }
  }
  for (int32_t arr = 0; arr < static_cast<int32_t>(syms.arrays.size()); ++arr)
    for (int32_t v = 0; v < m.nvalues; ++v) {
      auto it = s.cells.find({arr, owner[v]});
      int32_t c = it == s.cells.end() ? 0 : decided(s, color, vfind(s, it->second));
      m.cells[{arr, v}] = c;
    }
  return m;
}

std::optional<SatModel> dpll(const Ctx& cx, State& s, int64_t& budget) {
  if (--budget < 0) throw ResourceLimit("solver branch budget exhausted");
  if (!propagate(cx, s)) return std::nullopt;
  int branch = -1;
  for (size_t ci = 0; ci < cx.clauses.size(); ++ci)
    if (!s.done[ci]) {
      branch = static_cast<int>(ci);
      break;
    }
  if (branch < 0) {
    // All clauses hold; list-color the still-free enum classes against the
    // disequality edges, then read off a model.
    std::vector<int32_t> roots;
    for (int32_t i = 0; i < static_cast<int32_t>(s.vals.size()); ++i)
      if (vfind(s, i) == i && std::popcount(s.vals[i].allowed) > 1)
        roots.push_back(i);
    std::vector<int32_t> color(s.vals.size(), -1);
    if (!color_rec(s, roots, color, 0, budget)) return std::nullopt;
    return extract(cx, s, color);
  }
  // Split on the first open clause: branch i asserts literal i with literals
  // 0..i-1 pinned false, which covers the clause exhaustively.
  for (const Literal& l : cx.clauses[branch]) {
    if (eval_literal(cx, s, l) != Tri::Unknown) continue;
    State child = s;
    if (assert_literal(cx, child, l)) {
      child.done[branch] = 1;
      if (auto m = dpll(cx, child, budget)) return m;
    }
    if (!assert_literal(cx, s, l.negated())) return std::nullopt;
  }
  return std::nullopt;
}

Term ground_term(const Term& t, const std::vector<int32_t>& sel) {
  switch (t.kind) {
    case Term::Kind::Param:
      return Term::witness(sel.at(t.a));
    case Term::Kind::Read:
      if (t.ixk == Term::Kind::Param)
        return Term::read(t.a, Term::witness(sel.at(t.b)));
      return t;
    default:
      return t;
  }
}

Literal ground_lit(const Literal& l, const std::vector<int32_t>& sel) {
  return Literal::make(ground_term(l.lhs, sel), ground_term(l.rhs, sel), l.neq);
}

// Injective maps of n slots into witnesses 0..k-1, lexicographic.
template <class F>
void injections(int32_t n, int32_t k, F&& f) {
  std::vector<int32_t> sel(n);
  std::vector<char> used(k, 0);
  auto rec = [&](auto&& self, int32_t i) -> void {
    if (i == n) {
      f(sel);
      return;
    }
    for (int32_t w = 0; w < k; ++w) {
      if (used[w]) continue;
      used[w] = 1;
      sel[i] = w;
      self(self, i + 1);
      used[w] = 0;
    }
  };
  rec(rec, 0);
}

// All maps of n slots into witnesses 0..k-1 (repetition allowed), lexicographic.
template <class F>
void tuples(int32_t n, int32_t k, F&& f) {
  std::vector<int32_t> sel(n);
  auto rec = [&](auto&& self, int32_t i) -> void {
    if (i == n) {
      f(sel);
      return;
    }
    for (int32_t w = 0; w < k; ++w) {
      sel[i] = w;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char ch : s) {
    if (ch == '"' || ch == '\\') {
      out.push_back('\\');
      out.push_back(ch);
    } else if (static_cast<unsigned char>(ch) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", ch);
      out += buf;
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

}  // namespace

Solver::Solver(const CoreSystem& sys, const CubeStore& store, SolverOptions opt)
    : sys_(sys), store_(store), opt_(opt) {}

SatResult Solver::sat(const Query& q) {
  ++calls_;

  Ctx cx;
  cx.sys = &sys_;
  cx.k = q.nwitnesses;
  int32_t nproc = 0, nenum = 0;
  for (const GlobalDecl& g : sys_.syms.globals) {
    if (g.sort.is_proc()) {
      cx.pnode.push_back(cx.k + nproc++);
      cx.gnode.push_back(-1);
    } else {
      cx.pnode.push_back(-1);
      cx.gnode.push_back(nenum++);
    }
  }

  State s;
  s.pparent.resize(cx.k + nproc);
  std::iota(s.pparent.begin(), s.pparent.end(), 0);
  for (const GlobalDecl& g : sys_.syms.globals)
    if (!g.sort.is_proc())
      s.vals.push_back(ValNode{g.sort.type, full_mask(sys_.syms, g.sort.type),
                               static_cast<int32_t>(s.vals.size())});

  bool conflict = trivial_unsat(q.lits);

  cx.units = q.lits;
  if (!conflict && q.world && q.world->has_init()) {
    tuples(sys_.init_nparams, cx.k, [&](const std::vector<int32_t>& sel) {
      for (const Literal& l : sys_.init_lits)
        cx.units.push_back(ground_lit(l, sel));
    });
  }
  if (!conflict)
    for (const Literal& l : cx.units)
      if (!assert_literal(cx, s, l)) {
        conflict = true;
        break;
      }

  if (!conflict && q.world) {
    for (CubeId id : q.world->negated.ids()) {
      const Cube& c = store_.at(id);
      injections(c.nprocs, cx.k, [&](const std::vector<int32_t>& sel) {
        std::vector<Literal> clause;
        clause.reserve(c.lits.size());
        for (const Literal& l : c.lits)
          clause.push_back(ground_lit(l, sel).negated());
        if (clause.empty()) conflict = true;  // negated top: the world is false
        cx.clauses.push_back(std::move(clause));
      });
      if (conflict) break;
    }
  }
  s.done.assign(cx.clauses.size(), 0);

  SatResult res;
  if (!conflict) {
    int64_t budget = opt_.branch_budget;
    if (auto m = dpll(cx, s, budget)) {
      res.sat = true;
      res.model = std::move(*m);
      // A model must satisfy every asserted literal and every instantiated
      // clause; anything else is a solver bug.
      for (const Literal& l : cx.units)
        if (!res.model.eval(l))
          throw std::logic_error("solver model fails an asserted literal");
      for (const auto& cl : cx.clauses) {
        bool any = false;
        for (const Literal& l : cl) any = any || res.model.eval(l);
        if (!any) throw std::logic_error("solver model fails a world clause");
      }
    }
  }

  if (dump_) {
    std::ostream& os = *dump_;
    os << "{\"witnesses\":" << q.nwitnesses << ",\"lits\":[";
    for (size_t i = 0; i < q.lits.size(); ++i) {
      if (i) os << ',';
      os << '"' << json_escape(render_literal(sys_.syms, q.lits[i])) << '"';
    }
    os << "],\"world\":";
    if (q.world)
      os << '"' << json_escape(render_world(sys_.syms, store_, *q.world)) << '"';
    else
      os << "null";
    os << ",\"result\":\"" << (res.sat ? "sat" : "unsat") << '"';
    if (res.sat) {
      os << ",\"nvalues\":" << res.model.nvalues << ",\"globals\":[";
      for (size_t g = 0; g < res.model.globals.size(); ++g) {
        if (g) os << ',';
        os << res.model.globals[g];
      }
      os << "],\"cells\":[";
      bool first = true;
      for (const auto& [key, c] : res.model.cells) {
        if (!first) os << ',';
        first = false;
        os << '[' << key.first << ',' << key.second << ',' << c << ']';
      }
      os << ']';
    }
    os << "}\n";
  }
  return res;
}

SatResult Solver::sat_with_world(const Cube& c, const World& w) {
  if (c.is_false) return {};
  Query q;
  q.nwitnesses = c.nprocs;
  q.world = &w;
  std::vector<int32_t> sel(c.nprocs);
  std::iota(sel.begin(), sel.end(), 0);
  q.lits.reserve(c.lits.size());
  for (const Literal& l : c.lits) q.lits.push_back(ground_lit(l, sel));
  return sat(q);
}

bool Solver::entails_world(int32_t nwitnesses, const std::vector<Literal>& lits,
                           const World& w) {
  for (CubeId id : w.negated.ids()) {
    const Cube& c = store_.at(id);
    bool refuted = true;
    injections(c.nprocs, nwitnesses, [&](const std::vector<int32_t>& sel) {
      if (!refuted) return;
      Query q;
      q.nwitnesses = nwitnesses;
      q.lits = lits;
      for (const Literal& l : c.lits) q.lits.push_back(ground_lit(l, sel));
      if (sat(q).sat) refuted = false;
    });
    if (!refuted) return false;
  }
  if (w.has_init()) {
    bool holds = true;
    tuples(sys_.init_nparams, nwitnesses, [&](const std::vector<int32_t>& sel) {
      if (!holds) return;
      for (const Literal& l : sys_.init_lits) {
        Query q;
        q.nwitnesses = nwitnesses;
        q.lits = lits;
        q.lits.push_back(ground_lit(l, sel).negated());
        if (sat(q).sat) {
          holds = false;
          return;
        }
      }
    });
    if (!holds) return false;
  }
  return true;
}

}  // namespace far
