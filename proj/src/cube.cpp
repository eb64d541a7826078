#include "farcheck/cube.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <map>
#include <numeric>
#include <stdexcept>

#include "farcheck/diag.hpp"

namespace far {

std::string Diag::str() const {
  const char* k = "";
  switch (kind) {
    case Kind::SyntaxError: k = "syntax error"; break;
    case Kind::NameError: k = "name error"; break;
    case Kind::SortError: k = "sort error"; break;
    case Kind::DuplicateDecl: k = "duplicate declaration"; break;
  }
  std::string out;
  if (line > 0) out += std::to_string(line) + ":" + std::to_string(col) + ": ";
  out += k;
  out += ": ";
  out += msg;
  return out;
}

std::string render_term(const SymbolTable& syms, const Term& t) {
  switch (t.kind) {
    case Term::Kind::Const: return syms.ctor_name(t.a, t.b);
    case Term::Kind::Param: return "p" + std::to_string(t.a);
    case Term::Kind::Witness: return "#" + std::to_string(t.a);
    case Term::Kind::Global: return syms.globals.at(t.a).name;
    case Term::Kind::Read:
      return syms.arrays.at(t.a).name + "[" + render_term(syms, t.index()) + "]";
  }
  return "?";
}

std::string render_literal(const SymbolTable& syms, const Literal& l) {
  return render_term(syms, l.lhs) + (l.neq ? " <> " : " = ") +
         render_term(syms, l.rhs);
}

std::string render_cube(const SymbolTable& syms, const Cube& c) {
  if (c.is_false) return "false";
  if (c.is_top()) return "true";
  std::string out;
  if (c.nprocs > 0) {
    out += "∃";
    for (int32_t i = 0; i < c.nprocs; ++i) {
      if (i) out += ",";
      out += "p" + std::to_string(i);
    }
    out += ". ";
  }
  for (size_t i = 0; i < c.lits.size(); ++i) {
    if (i) out += " && ";
    out += render_literal(syms, c.lits[i]);
  }
  return out;
}

std::string render_world(const SymbolTable& syms, const CubeStore& store,
                         const World& w) {
  if (w.is_false(store)) return "⊥";
  std::string out = w.has_init() ? "init" : "⊤";
  for (CubeId id : w.negated.ids())
    out += " && ¬(" + render_cube(syms, store.at(id)) + ")";
  return out;
}

namespace {

// Union-find over the terms of a literal conjunction, driven by its equality
// literals. Tracks, per class, the constant / bound variable / witness it is
// pinned to; a second, different pin of the same flavor is a contradiction
// (equality chain forcing structurally distinct elements together). No array
// congruence: this is the syntactic layer only.
class EqClosure {
public:
  bool contradictory = false;

  void add_eq(const Term& a, const Term& b) { merge(node(a), node(b)); }

  bool same_class(const Term& a, const Term& b) {
    return find(node(a)) == find(node(b));
  }

  bool provably_distinct(const Term& a, const Term& b) {
    int ra = find(node(a)), rb = find(node(b));
    if (ra == rb) return false;
    const Tags& ta = tags_[ra];
    const Tags& tb = tags_[rb];
    if (ta.cst && tb.cst && !(*ta.cst == *tb.cst)) return true;
    if (ta.param >= 0 && tb.param >= 0 && ta.param != tb.param) return true;
    if (ta.wit >= 0 && tb.wit >= 0 && ta.wit != tb.wit) return true;
    return false;
  }

private:
  struct Tags {
    std::optional<Term> cst;
    int32_t param = -1;
    int32_t wit = -1;
  };

  int node(const Term& t) {
    auto it = index_.find(t.key());
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(parent_.size());
    index_.emplace(t.key(), id);
    parent_.push_back(id);
    Tags tg;
    if (t.kind == Term::Kind::Const) tg.cst = t;
    if (t.kind == Term::Kind::Param) tg.param = t.a;
    if (t.kind == Term::Kind::Witness) tg.wit = t.a;
    tags_.push_back(tg);
    return id;
  }

  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  void merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    Tags& ta = tags_[a];
    const Tags& tb = tags_[b];
    if (tb.cst) {
      if (ta.cst && !(*ta.cst == *tb.cst)) contradictory = true;
      ta.cst = tb.cst;
    }
    if (tb.param >= 0) {
      if (ta.param >= 0 && ta.param != tb.param) contradictory = true;
      ta.param = tb.param;
    }
    if (tb.wit >= 0) {
      if (ta.wit >= 0 && ta.wit != tb.wit) contradictory = true;
      ta.wit = tb.wit;
    }
  }

  std::map<std::array<int32_t, 4>, int> index_;
  std::vector<int> parent_;
  std::vector<Tags> tags_;
};

enum class Fold { Keep, True, False };

// Constant and structural-distinctness folding of a single oriented literal.
Fold fold_literal(const Literal& l) {
  const Term& a = l.lhs;
  const Term& b = l.rhs;
  if (a == b) return l.neq ? Fold::False : Fold::True;
  bool both_const = a.is_const() && b.is_const();
  bool both_param = a.kind == Term::Kind::Param && b.kind == Term::Kind::Param;
  bool both_wit = a.kind == Term::Kind::Witness && b.kind == Term::Kind::Witness;
  if (both_const || both_param || both_wit) {
    // a != b syntactically, and these flavors are pairwise distinct.
    return l.neq ? Fold::True : Fold::False;
  }
  return Fold::Keep;
}

bool var_used(const std::vector<Literal>& lits, int32_t i) {
  Term p = Term::param(i);
  for (const Literal& l : lits) {
    if (l.lhs == p || l.rhs == p) return true;
    for (const Term* t : {&l.lhs, &l.rhs})
      if (t->kind == Term::Kind::Read && t->index() == p) return true;
  }
  return false;
}

Term relabel_term(const Term& t, const std::vector<int32_t>& perm) {
  switch (t.kind) {
    case Term::Kind::Param:
      return Term::param(perm[t.a]);
    case Term::Kind::Read:
      if (t.ixk == Term::Kind::Param)
        return Term::read(t.a, Term::param(perm[t.b]));
      return t;
    default:
      return t;
  }
}

std::vector<Literal> relabel_sorted(const std::vector<Literal>& lits,
                                    const std::vector<int32_t>& perm) {
  std::vector<Literal> out;
  out.reserve(lits.size());
  for (const Literal& l : lits)
    out.push_back(Literal::make(relabel_term(l.lhs, perm),
                                relabel_term(l.rhs, perm), l.neq));
  std::sort(out.begin(), out.end(), lit_less);
  return out;
}

bool lits_less(const std::vector<Literal>& a, const std::vector<Literal>& b) {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [](const Literal& x, const Literal& y) { return x.key() < y.key(); });
}

}  // namespace

NormalizeResult normalize_cube(int32_t nprocs, std::vector<Literal> in,
                               bool canonical) {
  NormalizeResult bot{Cube::bottom(), std::vector<int32_t>(nprocs, -1)};

  std::vector<Literal> lits;
  lits.reserve(in.size());
  for (const Literal& raw : in) {
    Literal l = Literal::make(raw.lhs, raw.rhs, raw.neq);
    switch (fold_literal(l)) {
      case Fold::False: return bot;
      case Fold::True: continue;
      case Fold::Keep: lits.push_back(l);
    }
  }

  EqClosure cls;
  for (const Literal& l : lits)
    if (!l.neq) cls.add_eq(l.lhs, l.rhs);
  if (cls.contradictory) return bot;
  std::vector<Literal> kept;
  kept.reserve(lits.size());
  for (const Literal& l : lits) {
    if (l.neq) {
      if (cls.same_class(l.lhs, l.rhs)) return bot;
      if (cls.provably_distinct(l.lhs, l.rhs)) continue;  // implied
    }
    kept.push_back(l);
  }

  std::sort(kept.begin(), kept.end(), lit_less);
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());

  std::vector<int32_t> var_map(nprocs);
  if (!canonical) {
    std::iota(var_map.begin(), var_map.end(), 0);
    return {Cube{nprocs, std::move(kept), false}, std::move(var_map)};
  }

  // Prune bound variables that no literal mentions; over an unbounded
  // process domain they are vacuous.
  int32_t nkept = 0;
  for (int32_t i = 0; i < nprocs; ++i)
    var_map[i] = var_used(kept, i) ? nkept++ : -1;
  if (nkept != nprocs) {
    std::vector<int32_t> shrink(nprocs, 0);
    for (int32_t i = 0; i < nprocs; ++i)
      if (var_map[i] >= 0) shrink[i] = var_map[i];
    kept = relabel_sorted(kept, shrink);
  }

  if (nkept > 8)
    throw std::logic_error("cube arity beyond canonicalization limit");

  // Exhaustive minimization over variable permutations fixes the canonical
  // representative.
  std::vector<int32_t> perm(nkept);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Literal> best = kept;
  std::vector<int32_t> best_perm = perm;
  while (std::next_permutation(perm.begin(), perm.end())) {
    std::vector<Literal> cand = relabel_sorted(kept, perm);
    if (lits_less(cand, best)) {
      best = std::move(cand);
      best_perm = perm;
    }
  }
  for (int32_t i = 0; i < nprocs; ++i)
    if (var_map[i] >= 0) var_map[i] = best_perm[var_map[i]];

  return {Cube{nkept, std::move(best), false}, std::move(var_map)};
}

bool lits_trivially_false(const std::vector<Literal>& lits) {
  EqClosure cls;
  for (const Literal& raw : lits) {
    Literal l = Literal::make(raw.lhs, raw.rhs, raw.neq);
    if (fold_literal(l) == Fold::False) return true;
    if (!l.neq) cls.add_eq(l.lhs, l.rhs);
  }
  if (cls.contradictory) return true;
  for (const Literal& l : lits)
    if (l.neq && cls.same_class(l.lhs, l.rhs)) return true;
  return false;
}

Cube substitute(const Cube& c, int32_t new_nprocs,
                const std::vector<Term>& sigma) {
  if (c.is_false) return Cube::bottom();
  assert(static_cast<int32_t>(sigma.size()) == c.nprocs);
  for (const Term& t : sigma)
    assert(t.kind == Term::Kind::Param || t.kind == Term::Kind::Witness);

  auto apply = [&](const Term& t) -> Term {
    switch (t.kind) {
      case Term::Kind::Param:
        return sigma[t.a];
      case Term::Kind::Read:
        if (t.ixk == Term::Kind::Param)
          return Term::read(t.a, sigma[t.b]);
        return t;
      default:
        return t;
    }
  };

  std::vector<Literal> lits;
  lits.reserve(c.lits.size() + c.nprocs * 2);
  for (const Literal& l : c.lits)
    lits.push_back(Literal::make(apply(l.lhs), apply(l.rhs), l.neq));

  // Re-establish the distinctness of the original bound variables wherever
  // it stopped being structural.
  for (int32_t i = 0; i < c.nprocs; ++i) {
    for (int32_t j = i + 1; j < c.nprocs; ++j) {
      const Term& s = sigma[i];
      const Term& t = sigma[j];
      if (s == t) return Cube::bottom();
      if (s.kind != t.kind) lits.push_back(Literal::make(s, t, true));
    }
  }

  return normalize_cube(new_nprocs, std::move(lits), true).cube;
}

namespace {

bool unify_term(const Term& g, const Term& s, std::vector<int32_t>& map,
                std::vector<bool>& used) {
  if (g.kind == Term::Kind::Param) {
    if (s.kind != Term::Kind::Param) return false;
    if (map[g.a] >= 0) return map[g.a] == s.a;
    if (used[s.a]) return false;
    map[g.a] = s.a;
    used[s.a] = true;
    return true;
  }
  if (g.kind == Term::Kind::Read) {
    if (s.kind != Term::Kind::Read || g.a != s.a) return false;
    return unify_term(g.index(), s.index(), map, used);
  }
  return g == s;
}

bool embed(const Cube& g, const Cube& s, size_t gi, std::vector<int32_t>& map,
           std::vector<bool>& used) {
  if (gi == g.lits.size()) return true;
  const Literal& gl = g.lits[gi];
  for (const Literal& sl : s.lits) {
    if (gl.neq != sl.neq) continue;
    std::vector<int32_t> m2 = map;
    std::vector<bool> u2 = used;
    bool ok = (unify_term(gl.lhs, sl.lhs, m2, u2) &&
               unify_term(gl.rhs, sl.rhs, m2, u2)) ||
              ([&] {
                m2 = map;
                u2 = used;
                return unify_term(gl.lhs, sl.rhs, m2, u2) &&
                       unify_term(gl.rhs, sl.lhs, m2, u2);
              })();
    if (!ok) continue;
    if (embed(g, s, gi + 1, m2, u2)) {
      map = m2;
      used = u2;
      return true;
    }
  }
  return false;
}

}  // namespace

bool subsumes(const Cube& general, const Cube& specific) {
  if (specific.is_false) return true;
  if (general.is_false) return false;
  if (general.nprocs > specific.nprocs ||
      general.lits.size() > specific.lits.size())
    return false;
  std::vector<int32_t> map(general.nprocs, -1);
  std::vector<bool> used(specific.nprocs, false);
  return embed(general, specific, 0, map, used);
}

CubeId CubeStore::intern(const Cube& c) {
  assert(!c.is_false);
  std::string key;
  key.reserve(4 + c.lits.size() * 36);
  auto put = [&key](int32_t v) {
    key.append(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  put(c.nprocs);
  for (const Literal& l : c.lits)
    for (int32_t v : l.key()) put(v);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  CubeId id = static_cast<CubeId>(cubes_.size());
  cubes_.push_back(c);
  index_.emplace(std::move(key), id);
  return id;
}

bool CubeSet::insert(const CubeStore& store, CubeId id) {
  const Cube& c = store.at(id);
  for (CubeId m : ids_) {
    if (m == id) return false;
    if (subsumes(store.at(m), c)) return false;
  }
  std::erase_if(ids_, [&](CubeId m) { return subsumes(c, store.at(m)); });
  ids_.push_back(id);
  return true;
}

bool CubeSet::contains_subsumer(const CubeStore& store, const Cube& c) const {
  for (CubeId m : ids_)
    if (subsumes(store.at(m), c)) return true;
  return false;
}

World strengthen(CubeStore& store, const World& w, const Cube& cube) {
  assert(!cube.is_false);
  World out = w;
  out.negated.insert(store, store.intern(cube));
  return out;
}

bool world_entails_syntactic(const CubeStore& store, const World& a,
                             const World& b) {
  if (b.has_init() && !a.has_init()) return false;
  for (CubeId cb : b.negated.ids()) {
    bool covered = false;
    for (CubeId ca : a.negated.ids())
      if (subsumes(store.at(ca), store.at(cb))) {
        covered = true;
        break;
      }
    if (!covered) return false;
  }
  return true;
}

}  // namespace far
