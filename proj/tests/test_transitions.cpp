#include <vector>

#include "doctest.h"
#include "farcheck/diag.hpp"
#include "farcheck/transitions.hpp"
#include "support/load.hpp"

using namespace far;

namespace {

const CoreSystem& dekker() {
  static CoreSystem s = support::load_model("dekker");
  return s;
}

Term rd_want(Term ix) { return Term::read(0, ix); }
Term rd_crit(Term ix) { return Term::read(1, ix); }
Literal eq(Term l, Term r) { return Literal::make(l, r, false); }

const Transition& tau(const CoreSystem& s, const char* name) {
  for (const Transition& t : s.transitions)
    if (t.name == name) return t;
  throw std::logic_error("no such transition");
}

}  // namespace

TEST_CASE("pre-image through an update that satisfies the bad literal") {
  // unsafe = two critical processes; req toggles want only, so both crit
  // literals survive and the guard joins them. The parameter either merges
  // with a bad variable or stays fresh; neither disjunct subsumes the other.
  auto pres = pre_image(dekker().unsafe, tau(dekker(), "req"));
  REQUIRE(pres.size() == 2);

  CHECK(pres[0].cube.nprocs == 2);
  REQUIRE(pres[0].cube.lits.size() == 3);
  CHECK(pres[0].cube.lits[0] == eq(rd_want(Term::param(0)), Term::bfalse()));
  CHECK(pres[0].cube.lits[1] == eq(rd_crit(Term::param(0)), Term::btrue()));
  CHECK(pres[0].cube.lits[2] == eq(rd_crit(Term::param(1)), Term::btrue()));
  CHECK(pres[0].param_slot == std::vector<int32_t>{0});
  CHECK(pres[0].bad_to_param == std::vector<int32_t>{0, -1});
  CHECK(pres[0].bad_slot == std::vector<int32_t>{0, 1});

  CHECK(pres[1].cube.nprocs == 3);
  CHECK(pres[1].param_slot == std::vector<int32_t>{0});
  CHECK(pres[1].bad_to_param == std::vector<int32_t>{-1, -1});
  CHECK(pres[1].bad_slot == std::vector<int32_t>{1, 2});
}

TEST_CASE("pre-image drops disjuncts subsumed by another") {
  // enter writes crit[p], so the fresh-parameter disjunct keeps both crit
  // literals and is absorbed by the merged one.
  auto pres = pre_image(dekker().unsafe, tau(dekker(), "enter"));
  REQUIRE(pres.size() == 1);
  CHECK(pres[0].cube.nprocs == 2);
  REQUIRE(pres[0].cube.lits.size() == 3);
  CHECK(pres[0].cube.lits[0] ==
        eq(Term::global(0), Term::param(0)));  // turn = p0
  CHECK(pres[0].cube.lits[1] == eq(rd_want(Term::param(0)), Term::btrue()));
  CHECK(pres[0].cube.lits[2] == eq(rd_crit(Term::param(1)), Term::btrue()));
  CHECK(pres[0].bad_to_param == std::vector<int32_t>{0, -1});
}

TEST_CASE("pre-image refuses merges the update contradicts") {
  // exit clears crit[p]: identifying p with either bad variable would need
  // crit true after the write. Only the fresh split survives; q merges with
  // a bad variable in the kept representative.
  auto pres = pre_image(dekker().unsafe, tau(dekker(), "exit"));
  REQUIRE(pres.size() == 1);
  CHECK(pres[0].cube.nprocs == 3);
  REQUIRE(pres[0].cube.lits.size() == 3);
  for (const Literal& l : pres[0].cube.lits) CHECK(l.lhs.a == 1);  // all crit
  CHECK(pres[0].param_slot == std::vector<int32_t>{0, 1});
  CHECK(pres[0].bad_to_param == std::vector<int32_t>{1, -1});
  CHECK(pres[0].bad_slot == std::vector<int32_t>{1, 2});
}

TEST_CASE("a parameter used by no literal is pruned from the pre-image") {
  CoreSystem s = support::load_source(
      "array want[proc] : bool\n"
      "array crit[proc] : bool\n"
      "init (i) { want[i] = false && crit[i] = false }\n"
      "unsafe (x) { crit[x] = true }\n"
      "transition spawn (p q)\n"
      "requires { want[p] = false }\n"
      "{ want[p] := true; }\n");
  auto pres = pre_image(s.unsafe, tau(s, "spawn"));
  REQUIRE(pres.size() == 2);
  // First disjunct merges the bad variable with p; q appears nowhere and is
  // pruned, meaning any fresh process may stand in for it.
  CHECK(pres[0].cube.nprocs == 1);
  CHECK(pres[0].param_slot == std::vector<int32_t>{0, -1});
  CHECK(pres[0].bad_to_param == std::vector<int32_t>{0});
  // Second disjunct merges the bad variable with q instead.
  CHECK(pres[1].cube.nprocs == 2);
  CHECK(pres[1].bad_to_param == std::vector<int32_t>{1});
}

TEST_CASE("pre-image of bottom and of a disabled transition is empty") {
  CHECK(pre_image(Cube::bottom(), tau(dekker(), "req")).empty());
  Transition dead = tau(dekker(), "req");
  dead.guard = Cube::bottom();
  CHECK(pre_image(dekker().unsafe, dead).empty());
}

TEST_CASE("pre-image enforces the arity cap") {
  Cube wide;
  wide.nprocs = 5;
  for (int32_t i = 0; i < 5; ++i)
    wide.lits.push_back(eq(rd_crit(Term::param(i)), Term::btrue()));
  CHECK_THROWS_AS(pre_image(wide, tau(dekker(), "req"), 4), ArityLimit);
  CHECK_NOTHROW(pre_image(wide, tau(dekker(), "req"), 5));
}

TEST_CASE("enabledness under a world") {
  CubeStore store;
  Solver solver(dekker(), store);
  World init = World::init();
  CHECK(enabled(solver, init, tau(dekker(), "req")));
  // enter needs want[p] = true; exit needs crit[p] = true. Init forbids both.
  CHECK(!enabled(solver, init, tau(dekker(), "enter")));
  CHECK(!enabled(solver, init, tau(dekker(), "exit")));
  World top = World::top();
  CHECK(enabled(solver, top, tau(dekker(), "enter")));
}

TEST_CASE("post_entails pushes target clauses backwards") {
  CubeStore store;
  Solver solver(dekker(), store);
  World init = World::init();
  Cube crit1 = canonicalize({1, {eq(rd_crit(Term::param(0)), Term::btrue())}, false});
  Cube want1 = canonicalize({1, {eq(rd_want(Term::param(0)), Term::btrue())}, false});
  World no_crit = strengthen(store, World::top(), crit1);
  World no_want = strengthen(store, World::top(), want1);
  // req cannot make anyone critical, but it does set want.
  CHECK(post_entails(solver, init, tau(dekker(), "req"), no_crit));
  CHECK(!post_entails(solver, init, tau(dekker(), "req"), no_want));
  // A disabled transition entails anything.
  CHECK(post_entails(solver, init, tau(dekker(), "enter"), no_want));
}

TEST_CASE("post_intersects_bad reports the first satisfiable disjunct") {
  CubeStore store;
  Solver solver(dekker(), store);
  CHECK(!post_intersects_bad(solver, World::init(), tau(dekker(), "enter"),
                             dekker().unsafe)
             .has_value());
  auto hit = post_intersects_bad(solver, World::top(), tau(dekker(), "enter"),
                                 dekker().unsafe);
  REQUIRE(hit.has_value());
  CHECK(hit->pre.cube.nprocs == 2);
  CHECK(hit->model.nwitnesses == 2);
}
