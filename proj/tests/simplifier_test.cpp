#include "doctest.h"

#include "aet/simplifier.hpp"
#include "aet/subst.hpp"
#include "support.hpp"

using namespace aet;
using aet::testing::F;

namespace {

CompiledTheory theory_of(const std::string& text, Session& s) { return compile(parse_theory(text), s); }

}  // namespace

TEST_CASE("existentials move outwards through conjunction") {
  Session s;
  CompiledTheory th = theory_of("", s);
  CHECK(simplify(F("and(exists([X],p(X)), exists([Y],q(Y)))"), th) == F("exists([X,Y], and(p(X),q(Y)))"));
}

TEST_CASE("clashing bound names are primed when pulled out") {
  Formula f = move_quantifiers(F("and(exists([X],p(X)), exists([X],q(X)))"));
  CHECK(f == F("exists([X,X'], and(p(X),q(X')))"));
}

TEST_CASE("existential on an antecedent becomes a universal") {
  CHECK(move_quantifiers(F("impl(exists([X],p(X)), q(a))")) == F("forall([X], impl(p(X), q(a)))"));
}

TEST_CASE("equality with a constant is eliminated") {
  Session s;
  CompiledTheory th = theory_of("", s);
  CHECK(simplify(F("exists([Y], and(p(Y), Y=a))"), th) == F("p(a)"));
  CHECK(simplify(F("exists([X,Y], and(p(X), and(q(Y), X=Y)))"), th) == F("exists([Y], and(p(Y), q(Y)))"));
}

TEST_CASE("universal equality in an antecedent is eliminated") {
  Session s;
  CompiledTheory th = theory_of("", s);
  CHECK(simplify(F("forall([X,Y], impl(and(p(X), X=Y), q(Y)))"), th) == F("forall([Y], impl(p(Y), q(Y)))"));
}

TEST_CASE("distinct constants give a mismatch") {
  Session s;
  CompiledTheory th = theory_of("", s);
  CHECK(simplify(F("and(p(a), a=b)"), th) == F("and(p(a), mismatch(a,b))"));
  CHECK(mismatch_to_false(F("and(p(a), mismatch(a,b))")).is_false());
  CHECK(simplify(F("f(a,X) = f(Y,b)"), th) == F("and(a = Y, X = b)"));
}

TEST_CASE("only true ground arithmetic is substituted") {
  Session s;
  CompiledTheory th = theory_of("", s);
  CHECK(simplify(F("and(p(X), 3 < 4)"), th) == F("p(X)"));
  CHECK(simplify(F("and(p(X), 4 < 3)"), th) == F("and(p(X), 4 < 3)"));
}

TEST_CASE("conjunct implied by its context is removed") {
  Session s;
  CompiledTheory th = theory_of(R"(
    equiv and(employee1(Empl), car1(Car), have1(Event,Empl,Car)) <-> employee_has_car(Event,Empl,Car).
  )", s);
  CHECK(simplify(F("and(have1(E,mary,C), employee_has_car(E,mary,C))"), th) == F("employee_has_car(E,mary,C)"));
  // A duplicate keeps one copy.
  CHECK(simplify(F("and(p(X), p(X))"), th) == F("p(X)"));
  // Universal variables are never bound by the redundancy proof.
  CHECK(simplify(F("forall([X], impl(p(X), and(q(a), q(X))))"), th) == F("forall([X], impl(p(X), and(q(a), q(X))))"));
  // An existential variable confined to the conjunct may be.
  CHECK(simplify(F("exists([Y], and(q(a), q(Y)))"), th) == F("q(a)"));
}

TEST_CASE("functional merge of transaction atoms") {
  Session s;
  CompiledTheory th = theory_of("function transaction(P,T,D,Y,A), [T] -> [P,D,Y,A].", s);
  Formula f = F(
      "exists([P,E,A,Y,D,A1,Y1,A2,P2], and(transaction(P1,P,D1,Y,A), and(transaction(Ag,P,D2,Payee,A1), "
      "transaction(P2,P,Date,Y1,A2))))");
  Formula g = functional_merge(f, th);
  std::vector<Formula> atoms;
  collect_atoms(g, atoms);
  CHECK(atoms.size() == 1);
  CHECK(functional_merge(F("transaction(a,b,c,d,e)"), th) == F("transaction(a,b,c,d,e)"));
}

TEST_CASE("merging differing ground payees surfaces a mismatch") {
  Session s;
  CompiledTheory th = theory_of(
      "relation TRANS/4 class database [trn_id,cheque_date,payee,amount].\n"
      "function TRANS(I,D,P,A), [I] -> [D,P,A].",
      s);
  Formula g = simplify(F("exists([D,A,D1,A1], and(TRANS(7,D,bt,A), TRANS(7,D1,sun,A1)))"), th);
  REQUIRE(find_mismatch(g));
  CHECK(find_mismatch(g)->first == Term::constant("bt"));
}

TEST_CASE("two assertions graduate a single employee record") {
  Session s;
  CompiledTheory th = theory_of(
      "relation SRI_EMPLOYEE/3 class database [name,sex,has_car].\n"
      "function SRI_EMPLOYEE(N,S,C), [N] -> [S,C].",
      s);
  auto first = assert_simplify({}, F("exists([A], SRI_EMPLOYEE(clara,A,y))"), th, s);
  CHECK(first.graduated.empty());
  CHECK(first.cache.clauses.size() == 1);
  auto second = assert_simplify(first.cache, F("exists([H], SRI_EMPLOYEE(clara,w,H))"), th, s);
  CHECK(second.cache.empty());
  REQUIRE(second.graduated.size() == 1);
  CHECK(second.graduated[0] == F("SRI_EMPLOYEE(clara,w,y)"));
  CHECK(second.merges == 1);

  // The other order yields the same record.
  auto a = assert_simplify({}, F("exists([H], SRI_EMPLOYEE(clara,w,H))"), th, s);
  auto b = assert_simplify(a.cache, F("exists([A], SRI_EMPLOYEE(clara,A,y))"), th, s);
  REQUIRE(b.graduated.size() == 1);
  CHECK(b.graduated[0] == F("SRI_EMPLOYEE(clara,w,y)"));
}

TEST_CASE("ground assertion goes straight to the store") {
  Session s;
  CompiledTheory th = theory_of("", s);
  auto out = assert_simplify({}, F("p(a)"), th, s);
  CHECK(out.cache.empty());
  REQUIRE(out.graduated.size() == 1);
}

TEST_CASE("contradictory sex assertion is a presupposition failure") {
  Session s;
  CompiledTheory th = theory_of(
      "relation SRI_EMPLOYEE/3 class database [name,sex,has_car].\n"
      "function SRI_EMPLOYEE(N,S,C), [N] -> [S,C].",
      s);
  auto first = assert_simplify({}, F("exists([C], SRI_EMPLOYEE(clara,w,C))"), th, s);
  try {
    assert_simplify(first.cache, F("exists([C], SRI_EMPLOYEE(clara,m,C))"), th, s);
    FAIL("expected a presupposition failure");
  } catch (const PresuppositionFailure& e) {
    CHECK(e.left() == Term::constant("w"));
    CHECK(e.right() == Term::constant("m"));
  }
}
