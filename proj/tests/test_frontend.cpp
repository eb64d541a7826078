#include <string>

#include "doctest.h"
#include "farcheck/ast.hpp"
#include "farcheck/diag.hpp"
#include "farcheck/system.hpp"
#include "support/load.hpp"

using namespace far;

namespace {

Diag diag_of(const std::string& src) {
  try {
    elaborate(parse(src));
  } catch (const ParseError& e) {
    return e.diag;
  }
  FAIL("expected a parse error");
  return {};
}

const char* kMini =
    "type loc = Idle | Busy\n"
    "var owner : proc\n"
    "var mode : loc\n"
    "array pc[proc] : loc\n"
    "array done[proc] : bool\n"
    "init (i) { pc[i] = Idle && done[i] = false }\n"
    "unsafe (x y) { pc[x] = Busy && pc[y] = Busy }\n"
    "transition grab (p)\n"
    "requires { pc[p] = Idle && mode = Idle }\n"
    "{ pc[p] := Busy; owner := p; mode := Busy; }\n"
    "transition drop (p q)\n"
    "requires { pc[p] = Busy && owner = p }\n"
    "{ pc[p] := Idle; owner := q; mode := Idle; done[p] := true; }\n";

}  // namespace

TEST_CASE("a full system elaborates with declaration-ordered ids") {
  CoreSystem s = support::load_source(kMini);
  REQUIRE(s.syms.types.size() == 2);
  CHECK(s.syms.types[0].name == "bool");
  CHECK(s.syms.types[1].name == "loc");
  CHECK(s.syms.types[1].ctors == std::vector<std::string>{"Idle", "Busy"});
  REQUIRE(s.syms.globals.size() == 2);
  CHECK(s.syms.globals[0].name == "owner");
  CHECK(s.syms.globals[0].sort.is_proc());
  CHECK(s.syms.globals[1].sort == Sort{1});
  REQUIRE(s.syms.arrays.size() == 2);
  CHECK(s.syms.arrays[0].name == "pc");
  CHECK(s.syms.arrays[1].elem.is_bool());

  CHECK(s.init_nparams == 1);
  CHECK(s.init_lits.size() == 2);
  CHECK(s.unsafe.nprocs == 2);
  CHECK(s.unsafe.lits.size() == 2);

  REQUIRE(s.transitions.size() == 2);
  const Transition& grab = s.transitions[0];
  CHECK(grab.name == "grab");
  CHECK(grab.nparams == 1);
  CHECK(grab.guard.lits.size() == 2);
  // Every global gets an update term; unassigned ones are the identity.
  REQUIRE(grab.global_updates.size() == 2);
  CHECK(grab.global_updates[0] == Term::param(0));
  CHECK(grab.global_updates[1] == Term::cst(1, 1));
  // pc[p] := Busy desugars to a single-arm case with identity otherwise.
  REQUIRE(grab.array_updates.size() == 2);
  REQUIRE(grab.array_updates[0].arms.size() == 1);
  CHECK(grab.array_updates[0].arms[0].eq_param == 0);
  CHECK(grab.array_updates[0].arms[0].value == Term::cst(1, 1));
  CHECK(grab.array_updates[0].otherwise == Term::read(0, Term::param(1)));
  CHECK(grab.array_updates[1].arms.empty());

  const Transition& drop = s.transitions[1];
  CHECK(drop.nparams == 2);
  CHECK(drop.global_updates[0] == Term::param(1));
}

TEST_CASE("built-in bool constructors work in every position") {
  CoreSystem s = support::load_source(
      "var on : bool\n"
      "array f[proc] : bool\n"
      "init (i) { f[i] = false && on = false }\n"
      "unsafe (x) { f[x] = true && on = true }\n"
      "transition set (p) requires { f[p] = false } { f[p] := true; on := true; }\n");
  CHECK(s.init_lits.size() == 2);
  CHECK(s.transitions[0].global_updates[0] == Term::btrue());
}

TEST_CASE("comments lex away and track line numbers") {
  CoreSystem s = support::load_source(
      "(* leading\n   multi-line comment *)\n"
      "var on : bool (* trailing *)\n"
      "init (i) { on = false }\n"
      "unsafe (x) { on = true }\n"
      "transition t (p) requires { on = false } { on := true; }\n");
  CHECK(s.syms.globals.size() == 1);

  Diag d = diag_of("(* never closed\nvar on : bool\n");
  CHECK(d.kind == Diag::Kind::SyntaxError);
  CHECK(d.line == 1);
  CHECK(d.msg == "unterminated comment");
}

TEST_CASE("case-form array updates elaborate arm by arm") {
  CoreSystem s = support::load_source(
      "type loc = A | B | C\n"
      "array pc[proc] : loc\n"
      "init (i) { pc[i] = A }\n"
      "unsafe (x) { pc[x] = C }\n"
      "transition swap (p q)\n"
      "requires { pc[p] = A }\n"
      "{ pc[j] := case | j = p : B | j = q : C | _ : pc[j]; }\n");
  const ArrayUpdate& u = s.transitions[0].array_updates[0];
  REQUIRE(u.arms.size() == 2);
  CHECK(u.arms[0].eq_param == 0);
  CHECK(u.arms[0].value == Term::cst(1, 1));
  CHECK(u.arms[1].eq_param == 1);
  CHECK(u.arms[1].value == Term::cst(1, 2));
  // The otherwise term reads the running cell, one slot past the parameters.
  CHECK(u.otherwise == Term::read(0, Term::param(2)));
}

TEST_CASE("case conditions accept the parameter on either side") {
  CoreSystem s = support::load_source(
      "type loc = A | B\n"
      "array pc[proc] : loc\n"
      "init (i) { pc[i] = A }\n"
      "unsafe (x) { pc[x] = B }\n"
      "transition t (p)\n"
      "requires { pc[p] = A }\n"
      "{ pc[j] := case | p = j : B | _ : pc[j]; }\n");
  CHECK(s.transitions[0].array_updates[0].arms[0].eq_param == 0);
}

TEST_CASE("syntax errors carry positions") {
  Diag d = diag_of("var on bool\n");
  CHECK(d.kind == Diag::Kind::SyntaxError);
  CHECK(d.line == 1);
  CHECK(d.col == 8);
  CHECK(d.msg == "expected ':'");

  CHECK(diag_of("").kind == Diag::Kind::SyntaxError);
  CHECK(diag_of("frobnicate x\n").msg == "expected declaration");
  CHECK(diag_of("var _ : bool\ninit (i) { _ = _ }\nunsafe (x) { _ = _ }\n").msg ==
        "'_' is reserved");
}

TEST_CASE("missing init or unsafe is rejected") {
  Diag d = diag_of("var on : bool\nunsafe (x) { on = true }\n");
  CHECK(d.kind == Diag::Kind::SyntaxError);
  CHECK(d.msg == "missing init declaration");
  Diag d2 = diag_of("var on : bool\ninit (i) { on = false }\n");
  CHECK(d2.msg == "missing unsafe declaration");
}

TEST_CASE("name errors: undeclared, not-an-array, out-of-scope index") {
  Diag d = diag_of(
      "var on : bool\ninit (i) { off = false }\nunsafe (x) { on = true }\n");
  CHECK(d.kind == Diag::Kind::NameError);
  CHECK(d.line == 2);
  CHECK(d.msg == "undeclared 'off'");

  Diag d2 = diag_of(
      "var on : bool\ninit (i) { on[i] = false }\nunsafe (x) { on = true }\n");
  CHECK(d2.kind == Diag::Kind::NameError);
  CHECK(d2.msg == "'on' is not an array");

  Diag d3 = diag_of(
      "array f[proc] : bool\ninit (i) { f[j] = false }\n"
      "unsafe (x) { f[x] = true }\n");
  CHECK(d3.kind == Diag::Kind::NameError);
  CHECK(d3.msg == "array index 'j' is not a process variable in scope");

  Diag d4 = diag_of(
      "var on : zorp\ninit (i) { on = false }\nunsafe (x) { on = true }\n");
  CHECK(d4.kind == Diag::Kind::NameError);
  CHECK(d4.msg == "unknown sort 'zorp'");
}

TEST_CASE("sort errors: literal mismatch, proc arrays, bare arrays") {
  Diag d = diag_of(
      "type loc = A | B\nvar m : loc\nvar on : bool\n"
      "init (i) { m = true }\nunsafe (x) { on = true }\n");
  CHECK(d.kind == Diag::Kind::SortError);
  CHECK(d.msg == "sort mismatch in literal ('m' vs 'true')");

  Diag d2 = diag_of("array owner[proc] : proc\n");
  CHECK(d2.kind == Diag::Kind::SortError);
  CHECK(d2.msg == "proc-sorted arrays are not supported");

  Diag d3 = diag_of(
      "array f[proc] : bool\ninit (i) { f = true }\nunsafe (x) { f[x] = true }\n");
  CHECK(d3.kind == Diag::Kind::SortError);
  CHECK(d3.msg == "array 'f' used without an index");
}

TEST_CASE("duplicate declarations are rejected wherever they collide") {
  CHECK(diag_of("var on : bool\nvar on : bool\n").kind ==
        Diag::Kind::DuplicateDecl);
  CHECK(diag_of("type a = X\ntype b = X\n").kind == Diag::Kind::DuplicateDecl);
  // Built-in bool constructors cannot be shadowed.
  CHECK(diag_of("type a = true | X\n").kind == Diag::Kind::DuplicateDecl);
  CHECK(diag_of("init (i) { true = true }\ninit (j) { true = true }\n").msg ==
        "init declared twice");
  CHECK(diag_of("var on : bool\n"
                "init (i) { on = false }\nunsafe (x) { on = true }\n"
                "transition t (p) requires { on = false } { on := true; }\n"
                "transition t (p) requires { on = false } { on := true; }\n")
            .kind == Diag::Kind::DuplicateDecl);
  // Parameters cannot collide with declared names or each other.
  CHECK(diag_of("var on : bool\ninit (on) { true = true }\n").msg ==
        "parameter 'on' collides with a declaration");
  CHECK(diag_of("var g : bool\ninit (i i) { g = false }\n").msg ==
        "parameter 'i'");
  // A transition may not update the same target twice.
  CHECK(diag_of("var on : bool\n"
                "init (i) { on = false }\nunsafe (x) { on = true }\n"
                "transition t (p) requires { on = false }\n"
                "{ on := true; on := false; }\n")
            .msg == "'on' updated twice");
}

TEST_CASE("update targets must be assignable state") {
  Diag d = diag_of(
      "var on : bool\ninit (i) { on = false }\nunsafe (x) { on = true }\n"
      "transition t (p) requires { on = false } { p := true; }\n");
  CHECK(d.kind == Diag::Kind::NameError);
  CHECK(d.msg == "undeclared 'p'");

  Diag d2 = diag_of(
      "array f[proc] : bool\ninit (i) { f[i] = false }\n"
      "unsafe (x) { f[x] = true }\n"
      "transition t (p) requires { f[p] = false } { f := true; }\n");
  CHECK(d2.kind == Diag::Kind::SortError);
  CHECK(d2.msg == "array 'f' needs an index");

  Diag d3 = diag_of(
      "var on : bool\narray f[proc] : bool\ninit (i) { f[i] = false }\n"
      "unsafe (x) { f[x] = true }\n"
      "transition t (p) requires { f[p] = false } { on[p] := true; }\n");
  CHECK(d3.kind == Diag::Kind::SortError);
  CHECK(d3.msg == "'on' is not an array");
}

TEST_CASE("case form rejects malformed conditions") {
  const char* head =
      "type loc = A | B\narray pc[proc] : loc\ninit (i) { pc[i] = A }\n"
      "unsafe (x) { pc[x] = B }\n";
  Diag d = diag_of(std::string(head) +
                   "transition t (p) requires { pc[p] = A }\n"
                   "{ pc[j] := case | j <> p : B | _ : pc[j]; }\n");
  CHECK(d.kind == Diag::Kind::SortError);
  CHECK(d.msg == "case condition must be an equality");

  Diag d2 = diag_of(std::string(head) +
                    "transition t (p) requires { pc[p] = A }\n"
                    "{ pc[j] := case | j = p : B; }\n");
  CHECK(d2.kind == Diag::Kind::SyntaxError);
  CHECK(d2.msg == "case needs at least one conditional arm and a '_' default");

  // The case binder must be fresh, not a parameter.
  Diag d3 = diag_of(std::string(head) +
                    "transition t (p) requires { pc[p] = A }\n"
                    "{ pc[p] := case | p = p : B | _ : pc[p]; }\n");
  CHECK(d3.kind == Diag::Kind::DuplicateDecl);
  CHECK(d3.msg == "case index 'p' must be a fresh name");
}

TEST_CASE("unsafe is canonicalized, guards are not") {
  CoreSystem s = support::load_source(
      "array f[proc] : bool\ninit (i) { f[i] = false }\n"
      "unsafe (x y) { f[y] = true }\n"
      "transition t (p q) requires { f[q] = false } { f[q] := true; }\n");
  // The unused unsafe parameter x is pruned and y renamed to p0.
  CHECK(s.unsafe.nprocs == 1);
  CHECK(s.unsafe.lits[0] ==
        Literal::make(Term::read(0, Term::param(0)), Term::btrue(), false));
  // The guard keeps q at index 1.
  CHECK(s.transitions[0].guard.nprocs == 2);
  CHECK(s.transitions[0].guard.lits[0] ==
        Literal::make(Term::read(0, Term::param(1)), Term::bfalse(), false));
}

TEST_CASE("print_system output elaborates back to the same system") {
  for (const char* stem :
       {"dekker", "mux_sem", "german_ish", "german_ish2", "broken_dekker",
        "broken_mux_sem", "broken_german_ish", "broken_german_ish2"}) {
    CoreSystem s = support::load_model(stem);
    CoreSystem back = support::load_source(print_system(s));
    CHECK(back == s);
  }
  CoreSystem mini = support::load_source(kMini);
  CHECK(support::load_source(print_system(mini)) == mini);
}

TEST_CASE("diagnostic strings carry position and kind") {
  Diag d = diag_of("var on bool\n");
  CHECK(d.str() == "1:8: syntax error: expected ':'");
}
