#include "doctest.h"

#include "aet/planner.hpp"
#include "support.hpp"

using namespace aet;
using aet::testing::F;

namespace {

CompiledTheory planner_theory(Session& s) {
  return compile(parse_theory("relation TRANS/3 class database [payee,amount,id].\n"
                              "relation p/1 class database [a].\n"
                              "relation plus/3 class arithmetic.\n"
                              "relation execute/4 class executable.\n"
                              "relation t_precedes/2 class arithmetic.\n"),
                 s);
}

}  // namespace

TEST_CASE("generator moves ahead of the comparison") {
  Session s;
  auto th = planner_theory(s);
  CHECK(rearrange(F("and(X > 100, TRANS(john,X,Y))"), th) == F("and(TRANS(john,X,Y), X > 100)"));
}

TEST_CASE("ordered conjunction is unchanged") {
  Session s;
  auto th = planner_theory(s);
  Formula f = F("exists([X,Y], and(TRANS(john,X,Y), and(X > 100, p(Y))))");
  CHECK(rearrange(f, th) == f);
  CHECK(rearrange(rearrange(f, th), th) == rearrange(f, th));
}

TEST_CASE("nothing generates") {
  Session s;
  auto th = planner_theory(s);
  try {
    rearrange(F("and(X > 100, Y > 200)"), th);
    FAIL("expected NoFiniteStrategy");
  } catch (const NoFiniteStrategy& e) {
    REQUIRE(e.residue().size() == 2);
    CHECK(e.residue()[0] == F("X > 100"));
    CHECK(e.residue()[1] == F("Y > 200"));
  }
}

TEST_CASE("finiteness of single goals") {
  Session s;
  auto th = planner_theory(s);
  BindingState none;
  auto db = is_potentially_finite(F("TRANS(A,B,C)"), none, th);
  CHECK(db.finite);
  CHECK(db.after.bound("A"));
  CHECK(db.after.bound("C"));
  CHECK(!is_potentially_finite(F("t_precedes(X,Y)"), none, th).finite);
  CHECK(is_potentially_finite(F("t_precedes(date([1990,1,1]),date([1991,1,1]))"), none, th).finite);
  BindingState x;
  x.bind("X");
  CHECK(!is_potentially_finite(F("t_precedes(X,Y)"), x, th).finite);
  CHECK(!is_potentially_finite(F("plus(X,Y,Z)"), x, th).finite);
  x.bind("Y");
  auto plus = is_potentially_finite(F("plus(X,Y,Z)"), x, th);
  CHECK(plus.finite);
  CHECK(plus.after.bound("Z"));
  CHECK(!is_potentially_finite(F("execute(E,display([A]),clare,T)"), none, th).finite);
  BindingState a;
  a.bind("A");
  CHECK(is_potentially_finite(F("execute(E,display([A]),clare,T)"), a, th).finite);
  CHECK_THROWS_AS(is_potentially_finite(F("q(X)"), none, th), UndeclaredPredicate);
}

TEST_CASE("equalities link variables") {
  Session s;
  auto th = planner_theory(s);
  CHECK(rearrange(F("and(X = Y, and(Y > 3, p(X)))"), th) == F("and(X = Y, and(p(X), Y > 3))"));
}

TEST_CASE("consequent planned under the antecedent bindings") {
  testing::Fixture fx;
  testing::load_fixture(fx, "prm/prm.ldt");
  Formula f = F(
      "forall([Date,TransId,AMNum,DBDate],"
      " impl(and(db_date_convert(Date,DBDate), and(t_precedes(date([1990,1,1]),Date),"
      "          and(t_precedes(Date,date([1990,12,31])), TRANS(TransId,DBDate,bt,AMNum)))),"
      "      exists([DisplayEv,DisplayT],"
      "             and(t_precedes(now,DisplayT),"
      "                 execute(DisplayEv,display([TransId,Date,bt,amount(sterling,AMNum)]),clare,DisplayT)))))");
  Formula expected = F(
      "forall([Date,TransId,AMNum,DBDate],"
      " impl(and(TRANS(TransId,DBDate,bt,AMNum), and(db_date_convert(Date,DBDate),"
      "          and(t_precedes(date([1990,1,1]),Date), t_precedes(Date,date([1990,12,31]))))),"
      "      exists([DisplayEv,DisplayT],"
      "             and(execute(DisplayEv,display([TransId,Date,bt,amount(sterling,AMNum)]),clare,DisplayT),"
      "                 t_precedes(now,DisplayT)))))");
  CHECK(rearrange(f, fx.theory) == expected);
}
