#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "farcheck/diag.hpp"
#include "farcheck/system.hpp"

namespace far {

namespace {

[[noreturn]] void fail(Diag::Kind k, SrcPos at, std::string msg) {
  throw ParseError(Diag{k, at.line, at.col, std::move(msg)});
}

struct Env {
  SymbolTable syms;
  std::map<std::string, int32_t> type_ids;
  std::map<std::string, std::pair<int32_t, int32_t>> ctors;  // name -> (type, ix)
  std::map<std::string, int32_t> global_ids;
  std::map<std::string, int32_t> array_ids;

  Sort sort_of(const std::string& name, SrcPos pos) const {
    if (name == "proc") return Sort{Sort::kProc};
    if (name == "bool") return Sort{Sort::kBool};
    auto it = type_ids.find(name);
    if (it == type_ids.end())
      fail(Diag::Kind::NameError, pos, "unknown sort '" + name + "'");
    return Sort{it->second};
  }
};

// Term scope: parameter names to indices, plus the case binder if any.
struct TermScope {
  const std::vector<std::string>* params;
  std::string binder;
  int32_t binder_ix = -1;

  int32_t param_ix(const std::string& n) const {
    for (size_t i = 0; i < params->size(); ++i)
      if ((*params)[i] == n) return static_cast<int32_t>(i);
    return -1;
  }
};

Term make_term(const Env& env, const TermScope& sc, const AstTerm& t,
               Sort* sort_out) {
  if (t.index) {
    auto ait = env.array_ids.find(t.name);
    if (ait == env.array_ids.end())
      fail(Diag::Kind::NameError, t.pos, "'" + t.name + "' is not an array");
    Term ix;
    if (*t.index == sc.binder && sc.binder_ix >= 0) {
      ix = Term::param(sc.binder_ix);
    } else {
      int32_t p = sc.param_ix(*t.index);
      if (p < 0)
        fail(Diag::Kind::NameError, t.pos,
             "array index '" + *t.index + "' is not in scope");
      ix = Term::param(p);
    }
    *sort_out = env.syms.arrays[ait->second].elem;
    return Term::read(ait->second, ix);
  }
  if (t.name == sc.binder && sc.binder_ix >= 0) {
    *sort_out = Sort{Sort::kProc};
    return Term::param(sc.binder_ix);
  }
  if (int32_t p = sc.param_ix(t.name); p >= 0) {
    *sort_out = Sort{Sort::kProc};
    return Term::param(p);
  }
  if (auto it = env.ctors.find(t.name); it != env.ctors.end()) {
    *sort_out = Sort{it->second.first};
    return Term::cst(it->second.first, it->second.second);
  }
  if (auto it = env.global_ids.find(t.name); it != env.global_ids.end()) {
    *sort_out = env.syms.globals[it->second].sort;
    return Term::global(it->second);
  }
  fail(Diag::Kind::NameError, t.pos, "undeclared '" + t.name + "'");
}

Literal make_lit(const Env& env, const TermScope& sc, const AstLit& l) {
  Sort ls, rs;
  Term lhs = make_term(env, sc, l.lhs, &ls);
  Term rhs = make_term(env, sc, l.rhs, &rs);
  if (!(ls == rs))
    fail(Diag::Kind::SortError, l.rhs.pos, "sort mismatch in literal");
  return Literal::make(lhs, rhs, l.neq);
}

std::vector<Literal> make_lits(const Env& env, const TermScope& sc,
                               const std::vector<AstLit>& in) {
  std::vector<Literal> out;
  out.reserve(in.size());
  for (const AstLit& l : in) out.push_back(make_lit(env, sc, l));
  return out;
}

}  // namespace

CoreSystem elaborate(const SystemAst& ast) {
  Env env;
  for (const AstTypeDecl& td : ast.types) {
    int32_t id = static_cast<int32_t>(env.syms.types.size());
    if (env.type_ids.count(td.name))
      fail(Diag::Kind::DuplicateDecl, td.pos, "type '" + td.name + "'");
    env.type_ids.emplace(td.name, id);
    for (const std::string& c : td.ctors) {
      if (env.ctors.count(c) || c == "false" || c == "true")
        fail(Diag::Kind::DuplicateDecl, td.pos, "constructor '" + c + "'");
      env.ctors.emplace(c, std::make_pair(id, static_cast<int32_t>(
                                                  env.ctors.size())));
    }
    env.syms.types.push_back(EnumType{td.name, td.ctors});
  }
  // Constructor indices are per type, not global; rebuild them per type.
  env.ctors.clear();
  for (size_t t = 1; t < env.syms.types.size(); ++t)
    for (size_t c = 0; c < env.syms.types[t].ctors.size(); ++c)
      env.ctors.emplace(
          env.syms.types[t].ctors[c],
          std::make_pair(static_cast<int32_t>(t), static_cast<int32_t>(c)));
  env.ctors.emplace("false", std::make_pair(0, 0));
  env.ctors.emplace("true", std::make_pair(0, 1));

  for (const AstVarDecl& vd : ast.globals) {
    if (env.global_ids.count(vd.name))
      fail(Diag::Kind::DuplicateDecl, vd.pos, "var '" + vd.name + "'");
    env.global_ids.emplace(vd.name,
                           static_cast<int32_t>(env.syms.globals.size()));
    env.syms.globals.push_back(GlobalDecl{vd.name, env.sort_of(vd.sort, vd.pos)});
  }
  for (const AstArrayDecl& ad : ast.arrays) {
    if (env.array_ids.count(ad.name))
      fail(Diag::Kind::DuplicateDecl, ad.pos, "array '" + ad.name + "'");
    Sort elem = env.sort_of(ad.elem, ad.pos);
    if (elem.is_proc())
      fail(Diag::Kind::SortError, ad.pos, "proc-sorted arrays are not supported");
    env.array_ids.emplace(ad.name,
                          static_cast<int32_t>(env.syms.arrays.size()));
    env.syms.arrays.push_back(ArrayDecl{ad.name, elem});
  }

  CoreSystem sys;
  sys.syms = env.syms;

  if (!ast.init.present)
    fail(Diag::Kind::SyntaxError, SrcPos{}, "missing init declaration");
  if (!ast.unsafe.present)
    fail(Diag::Kind::SyntaxError, SrcPos{}, "missing unsafe declaration");

  {
    TermScope sc{&ast.init.params, "", -1};
    sys.init_nparams = static_cast<int32_t>(ast.init.params.size());
    std::vector<Literal> raw = make_lits(env, sc, ast.init.lits);
    NormalizeResult nr = normalize_cube(sys.init_nparams, raw, false);
    // A contradictory init (no initial states) keeps its raw literals; the
    // cube form cannot carry bottom without losing them.
    sys.init_lits = nr.cube.is_false ? raw : nr.cube.lits;
  }
  {
    TermScope sc{&ast.unsafe.params, "", -1};
    sys.unsafe = normalize_cube(static_cast<int32_t>(ast.unsafe.params.size()),
                                make_lits(env, sc, ast.unsafe.lits), true)
                     .cube;
  }

  for (const AstTransition& at : ast.transitions) {
    Transition tr;
    tr.name = at.name;
    tr.nparams = static_cast<int32_t>(at.params.size());
    tr.param_names = at.params;
    TermScope sc{&at.params, "", -1};
    tr.guard =
        normalize_cube(tr.nparams, make_lits(env, sc, at.guard), false).cube;

    int32_t cell = tr.nparams;  // the running cell index variable
    tr.global_updates.reserve(env.syms.globals.size());
    for (size_t g = 0; g < env.syms.globals.size(); ++g)
      tr.global_updates.push_back(Term::global(static_cast<int32_t>(g)));
    tr.array_updates.reserve(env.syms.arrays.size());
    for (size_t a = 0; a < env.syms.arrays.size(); ++a)
      tr.array_updates.push_back(
          ArrayUpdate{{}, Term::read(static_cast<int32_t>(a), Term::param(cell))});

    for (const AstUpdate& u : at.updates) {
      if (!u.index) {
        auto it = env.global_ids.find(u.target);
        if (it == env.global_ids.end())
          fail(Diag::Kind::NameError, u.pos, "'" + u.target + "' is not a var");
        Sort vs;
        Term v = make_term(env, sc, *u.value, &vs);
        if (!(vs == env.syms.globals[it->second].sort))
          fail(Diag::Kind::SortError, u.pos, "assignment sort mismatch");
        tr.global_updates[it->second] = v;
        continue;
      }
      auto it = env.array_ids.find(u.target);
      if (it == env.array_ids.end())
        fail(Diag::Kind::NameError, u.pos, "'" + u.target + "' is not an array");
      int32_t a = it->second;
      Sort elem = env.syms.arrays[a].elem;
      ArrayUpdate au;
      au.otherwise = Term::read(a, Term::param(cell));
      if (u.arms.empty()) {
        // a[p] := t  desugars to  case | j = p : t | _ : a[j]
        int32_t p = sc.param_ix(*u.index);
        if (p < 0)
          fail(Diag::Kind::NameError, u.pos,
               "array index '" + *u.index + "' is not a parameter");
        Sort vs;
        Term v = make_term(env, sc, *u.value, &vs);
        if (!(vs == elem))
          fail(Diag::Kind::SortError, u.pos, "assignment sort mismatch");
        au.arms.push_back(CaseArm{p, v});
      } else {
        TermScope arm_sc{&at.params, *u.index, cell};
        for (const AstCaseArm& arm : u.arms) {
          Sort vs;
          Term v = make_term(env, arm_sc, arm.value, &vs);
          if (!(vs == elem))
            fail(Diag::Kind::SortError, u.pos, "case value sort mismatch");
          if (!arm.cond) {
            au.otherwise = v;
            continue;
          }
          // One side is the binder, the other a parameter.
          const AstTerm& l = arm.cond->lhs;
          const AstTerm& r = arm.cond->rhs;
          const AstTerm& pside = (l.name == *u.index && !l.index) ? r : l;
          int32_t p = sc.param_ix(pside.name);
          if (p < 0 || pside.index || arm.cond->neq)
            fail(Diag::Kind::SortError, u.pos,
                 "case condition must equate the cell index with a parameter");
          au.arms.push_back(CaseArm{p, v});
        }
      }
      tr.array_updates[a] = std::move(au);
    }
    sys.transitions.push_back(std::move(tr));
  }
  return sys;
}

namespace {

std::string surface_term(const CoreSystem& sys, const Term& t,
                         const std::vector<std::string>& params,
                         const std::string& binder) {
  auto var_name = [&](int32_t ix) -> std::string {
    if (ix == static_cast<int32_t>(params.size())) return binder;
    return params.at(ix);
  };
  switch (t.kind) {
    case Term::Kind::Const:
      return sys.syms.ctor_name(t.a, t.b);
    case Term::Kind::Param:
      return var_name(t.a);
    case Term::Kind::Global:
      return sys.syms.globals.at(t.a).name;
    case Term::Kind::Read:
      return sys.syms.arrays.at(t.a).name + "[" +
             surface_term(sys, t.index(), params, binder) + "]";
    case Term::Kind::Witness:
      break;
  }
  throw std::logic_error("witness in printed system");
}

std::string surface_lits(const CoreSystem& sys,
                         const std::vector<Literal>& lits,
                         const std::vector<std::string>& params) {
  if (lits.empty()) return "true = true";
  std::string out;
  for (size_t i = 0; i < lits.size(); ++i) {
    if (i) out += " && ";
    out += surface_term(sys, lits[i].lhs, params, "");
    out += lits[i].neq ? " <> " : " = ";
    out += surface_term(sys, lits[i].rhs, params, "");
  }
  return out;
}

// Parameter names for printed init/unsafe, avoiding every declared name.
std::vector<std::string> fresh_params(const CoreSystem& sys, int32_t n,
                                      const std::string& stem) {
  std::set<std::string> taken;
  for (const auto& t : sys.syms.types) {
    taken.insert(t.name);
    for (const auto& c : t.ctors) taken.insert(c);
  }
  for (const auto& g : sys.syms.globals) taken.insert(g.name);
  for (const auto& a : sys.syms.arrays) taken.insert(a.name);
  for (const auto& tr : sys.transitions) taken.insert(tr.name);
  std::string prefix = stem;
  for (;;) {
    bool clash = false;
    for (int32_t i = 0; i < n; ++i)
      if (taken.count(prefix + std::to_string(i))) clash = true;
    if (!clash) break;
    prefix += stem;
  }
  std::vector<std::string> out;
  for (int32_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::string fresh_binder(const CoreSystem& sys,
                         const std::vector<std::string>& params) {
  std::set<std::string> taken(params.begin(), params.end());
  for (const auto& t : sys.syms.types) {
    taken.insert(t.name);
    for (const auto& c : t.ctors) taken.insert(c);
  }
  for (const auto& g : sys.syms.globals) taken.insert(g.name);
  for (const auto& a : sys.syms.arrays) taken.insert(a.name);
  for (const auto& tr : sys.transitions) taken.insert(tr.name);
  std::string b = "j";
  while (taken.count(b)) b += "j";
  return b;
}

}  // namespace

std::string print_system(const CoreSystem& sys) {
  std::ostringstream os;
  for (size_t t = 1; t < sys.syms.types.size(); ++t) {
    os << "type " << sys.syms.types[t].name << " = ";
    const auto& cs = sys.syms.types[t].ctors;
    for (size_t c = 0; c < cs.size(); ++c) os << (c ? " | " : "") << cs[c];
    os << "\n";
  }
  for (const auto& g : sys.syms.globals)
    os << "var " << g.name << " : " << sys.syms.sort_name(g.sort) << "\n";
  for (const auto& a : sys.syms.arrays)
    os << "array " << a.name << "[proc] : " << sys.syms.sort_name(a.elem)
       << "\n";

  {
    auto ps = fresh_params(sys, sys.init_nparams, "i");
    os << "\ninit (";
    for (size_t i = 0; i < ps.size(); ++i) os << (i ? " " : "") << ps[i];
    os << ") { " << surface_lits(sys, sys.init_lits, ps) << " }\n";
  }
  {
    auto ps = fresh_params(sys, sys.unsafe.nprocs, "z");
    os << "unsafe (";
    for (size_t i = 0; i < ps.size(); ++i) os << (i ? " " : "") << ps[i];
    os << ") { ";
    if (sys.unsafe.is_false)
      os << "true = false";
    else
      os << surface_lits(sys, sys.unsafe.lits, ps);
    os << " }\n";
  }

  for (const auto& tr : sys.transitions) {
    os << "\ntransition " << tr.name << " (";
    for (size_t i = 0; i < tr.param_names.size(); ++i)
      os << (i ? " " : "") << tr.param_names[i];
    os << ")\n  requires { ";
    if (tr.guard.is_false)
      os << "true = false";
    else
      os << surface_lits(sys, tr.guard.lits, tr.param_names);
    os << " }\n{\n";
    std::string binder = fresh_binder(sys, tr.param_names);
    for (size_t g = 0; g < sys.syms.globals.size(); ++g) {
      if (tr.global_updates[g] == Term::global(static_cast<int32_t>(g)))
        continue;
      os << "  " << sys.syms.globals[g].name << " := "
         << surface_term(sys, tr.global_updates[g], tr.param_names, binder)
         << ";\n";
    }
    for (size_t a = 0; a < sys.syms.arrays.size(); ++a) {
      const ArrayUpdate& au = tr.array_updates[a];
      Term ident = Term::read(static_cast<int32_t>(a), Term::param(tr.nparams));
      if (au.arms.empty() && au.otherwise == ident) continue;
      os << "  " << sys.syms.arrays[a].name << "[" << binder << "] := case";
      for (const CaseArm& arm : au.arms)
        os << " | " << binder << " = " << tr.param_names.at(arm.eq_param)
           << " : " << surface_term(sys, arm.value, tr.param_names, binder);
      os << " | _ : " << surface_term(sys, au.otherwise, tr.param_names, binder)
         << ";\n";
    }
    os << "}\n";
  }
  return os.str();
}

}  // namespace far
