#include "doctest.h"

#include "properties.hpp"

using namespace aet;

TEST_CASE("property: translations are equivalent under the fixpoint oracle") {
  auto rep = testing::translation_property(500, 53);
  MESSAGE("instances ", rep.instances, " attempts ", rep.attempts, " untranslatable ", rep.untranslatable,
          " with assumptions ", rep.with_assumptions, " second route ", rep.second_route, " mutants caught ",
          rep.caught, "/", rep.mutants, " seconds ", rep.seconds);
  CHECK_MESSAGE(rep.oracle_failures == 0, rep.first_failure);
  CHECK_MESSAGE(rep.route_failures == 0, rep.first_failure);
  CHECK_MESSAGE(rep.shape_failures == 0, rep.first_failure);
  CHECK(rep.instances == 500);
  CHECK(rep.with_assumptions > 0);
  CHECK(rep.second_route > 250);
  CHECK(rep.caught > 30);
  CHECK(rep.seconds < 60);
}

TEST_CASE("oracle notices a wrong target") {
  Session session;
  CompiledTheory th =
      compile(parse_theory(std::string(testing::kTranslationSchema) + "equiv c1(X) <-> S(X).\n"), session);
  RelStore store(th);
  store.add("S", {Term::constant("a")});
  store.add("R", {Term::constant("b"), Term::constant("a")});
  std::set<Term> u{Term::constant("a"), Term::constant("b")};
  CHECK(check_equivalence(testing::F("c1(a)"), testing::F("S(a)"), {}, th, store, u).equal);
  auto v = check_equivalence(testing::F("c1(b)"), testing::F("exists([Y], R(b,Y))"), {}, th, store, u);
  CHECK(!v.equal);
  CHECK(!v.witness.empty());
}
