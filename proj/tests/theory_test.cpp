#include "doctest.h"

#include <sstream>

#include "aet/errors.hpp"
#include "aet/session.hpp"
#include "aet/subst.hpp"
#include "support.hpp"

using namespace aet;
using aet::testing::F;

namespace {

CompiledTheory compile_text(const std::string& text) {
  Session session;
  return compile(parse_theory(text), session);
}

// Each LHS conjunct of a compiled equivalence has one normal reading; each
// atomic RHS conjunct has one backward reading.
void check_reading_counts(const CompiledTheory& th) {
  for (const auto& e : th.equivs) {
    CHECK(th.count_clauses(ClauseOrigin::Normal, e.id) == e.lhs.size());
    std::size_t atoms = 0;
    for (const auto& q : e.rhs_conjuncts) atoms += q.is_atom() ? 1 : 0;
    CHECK(th.count_clauses(ClauseOrigin::Backward, e.id) == atoms);
  }
  for (const auto& c : th.clauses) {
    if (c.origin != ClauseOrigin::Normal && c.origin != ClauseOrigin::Backward) continue;
    const auto& e = th.equivs.at(static_cast<std::size_t>(c.rule));
    const auto& side = c.origin == ClauseOrigin::Normal ? e.lhs : e.rhs_conjuncts;
    bool found = false;
    for (const auto& a : side) found = found || a.pred() == c.head.pred();
    CHECK(found);
  }
}

}  // namespace

TEST_CASE("declaration forms") {
  Theory t = parse_theory(
      "relation SRI_EMPLOYEE/3 class database [name,sex,has_car].\n"
      "equiv and(woman1(P),employee1(P)) <-> exists([H], SRI_EMPLOYEE(P,w,H)).\n"
      "function transaction(P,T,D,Y,A), [T] -> [P,D,Y,A].\n"
      "hc employee1(X) <- SRI_EMPLOYEE(X,S,C).\n"
      "hc base(a).\n"
      "assumable timesheet_data_complete(P), 5, bookings, limitation, hours_booked(X,P,H).\n"
      "neg d(X) <- t_before(X, date([1988,8,17])).\n"
      "call_pattern db_date_convert(D,DB), [1] -> [2].\n"
      "quick_fail p(X,Y) when [ground, any].\n"
      "quick_det q(X) when [ground].\n");
  REQUIRE(t.equivs.size() == 1);
  CHECK(t.equivs[0].lhs.size() == 2);
  REQUIRE(t.functions.size() == 1);
  CHECK(t.functions[0].from == std::vector<std::string>{"T"});
  CHECK(t.functions[0].to == std::vector<std::string>{"P", "D", "Y", "A"});
  CHECK(t.clauses.size() == 2);
  CHECK(t.clauses[1].body.empty());
  REQUIRE(t.assumables.size() == 1);
  CHECK(t.assumables[0].kind == AssumptionKind::Limitation);
  CHECK(t.assumables[0].cost == 5);
  CHECK(t.negs.size() == 1);
  REQUIRE(t.call_patterns.size() == 1);
  CHECK(t.call_patterns[0].in == std::set<std::size_t>{0});
  CHECK(t.quick_tests.size() == 2);
  CHECK(t.quick_tests[0].failure);
  CHECK(t.relations.size() == 1);
  CHECK(parse_theory("% only a comment\n").empty());
  CHECK(parse_theory("").empty());
}

TEST_CASE("theory errors") {
  CHECK_THROWS_AS(parse_theory("equiv p(X) <-> q(X)"), SyntaxError);
  CHECK_THROWS_AS(parse_theory("function p(X,Y), [X] -> [Y].\nfunction p(A,B), [A] -> [B].\n"),
                  DuplicateFunctionDecl);
  CHECK_THROWS_AS(parse_theory("relation R/2 class database [a,b].\nhc p(X) <- R(X).\n"), ArityMismatch);
  CHECK_THROWS_AS(compile_text("hc aux_p(a).\n"), AuxNameCollision);
  CHECK_THROWS_AS(parse_theory("hc p(sk(1)).\n"), SyntaxError);
  try {
    parse_theory("hc p(a).\nhc q(b) <- .\n", "t.ldt");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.location().line == 2);
    CHECK(e.location().file == "t.ldt");
  }
}

TEST_CASE("readings of a two-conjunct equivalence") {
  CompiledTheory th = compile_text("equiv and(woman1(P),employee1(P)) <-> exists([H], SRI_EMPLOYEE(P,w,H)).\n");
  REQUIRE(th.equivs.size() == 1);
  std::vector<std::string> normal, backward;
  for (const auto& c : th.clauses) {
    if (c.origin == ClauseOrigin::Normal) normal.push_back(c.head.pred());
    if (c.origin == ClauseOrigin::Backward) {
      backward.push_back(c.head.pred());
      CHECK(c.head.args()[2].is_skolem());
      CHECK(c.head.args()[2].args().size() == 1);
      CHECK(c.body.size() == 2);
    }
  }
  CHECK(normal == std::vector<std::string>{"woman1", "employee1"});
  CHECK(backward == std::vector<std::string>{"SRI_EMPLOYEE"});
  check_reading_counts(th);
}

TEST_CASE("existential left-hand side introduces an auxiliary predicate") {
  CompiledTheory th = compile_text(
      "equiv exists([Event,Car], and(employee1(Empl), car1(Car), have1(Event,Empl,Car))) <->\n"
      "      exists([Sex], SRI_EMPLOYEE(Empl,Sex,y)).\n");
  REQUIRE(th.equivs.size() == 2);
  REQUIRE(th.aux_preds.size() == 1);
  CHECK(th.aux_preds.begin()->rfind("aux_employee1_", 0) == 0);
  const auto& def = th.equivs[0];
  const auto& use = th.equivs[1];
  CHECK(def.lhs.size() == 3);
  CHECK(def.rhs.is_atom());
  CHECK(th.aux_preds.count(def.rhs.key()));
  CHECK(use.lhs_vars.size() == 2);
  REQUIRE(use.lhs.size() == 1);
  CHECK(use.lhs[0].pred() == def.rhs.pred());
  check_reading_counts(th);
}

TEST_CASE("function declarations expand to equalities") {
  CompiledTheory th = compile_text("function SRI_EMPLOYEE(N,S,C), [N] -> [S,C].\n");
  REQUIRE(th.function_rules.size() == 1);
  const auto& r = th.function_rules[0];
  REQUIRE(r.lhs.size() == 1);
  CHECK(r.conds.is_atom());
  CHECK(r.conds.pred() == "SRI_EMPLOYEE");
  CHECK(r.conds.args()[0] == r.lhs[0].args()[0]);
  CHECK(r.conds.args()[1] != r.lhs[0].args()[1]);
  CHECK(r.rhs_conjuncts.size() == 2);
  for (const auto& c : r.rhs_conjuncts) CHECK(c.is_eq());
}

TEST_CASE("a lone Horn clause compiles to itself") {
  CompiledTheory th = compile_text("hc p(a).\n");
  CHECK(th.equivs.empty());
  CHECK(th.equiv_index.empty());
  REQUIRE(th.clauses.size() == 1);
  CHECK(th.clauses[0].head == F("p(a)"));
}

TEST_CASE("bundled theories satisfy the reading counts and compile deterministically") {
  for (const char* rel : {"prm/prm.ldt", "mini/women.ldt", "mini/payee.ldt"}) {
    testing::Fixture a, b;
    testing::load_fixture(a, rel);
    testing::load_fixture(b, rel);
    check_reading_counts(a.theory);
    REQUIRE(a.theory.clauses.size() == b.theory.clauses.size());
    for (std::size_t i = 0; i < a.theory.clauses.size(); ++i)
      CHECK(to_string(a.theory.clauses[i]) == to_string(b.theory.clauses[i]));
    CHECK(a.theory.aux_preds == b.theory.aux_preds);
  }
}

TEST_CASE("store loading") {
  testing::Fixture fx;
  testing::load_fixture(fx, "prm/prm.ldt");
  CHECK(fx.store.tuples("SRI_EMPLOYEE").size() == 4);
  CHECK(fx.store.contains("SRI_EMPLOYEE", {Term::constant("peter"), Term::constant("m"), Term::constant("y")}));
  const auto* trans = fx.theory.relation("TRANS", 4);
  REQUIRE(trans);
  RelStore s = load_csv_text("trn_id,cheque_date,payee,amount\n1,1990-01-10,bt,12.5\n1,1990-01-10,bt,12.5\n", *trans);
  REQUIRE(s.tuples("TRANS").size() == 1);
  const auto& row = s.tuples("TRANS")[0];
  CHECK(row[0].is_number());
  CHECK(row[1] == Term::date(1990, 1, 10));
  CHECK(row[2] == Term::constant("bt"));
  CHECK_THROWS_AS(load_csv_text("trn_id,date,payee,amount\n", *trans), HeaderMismatch);
  CHECK_THROWS_AS(load_csv_text("trn_id,cheque_date,payee,amount\n1,2\n", *trans), RaggedRow);
}
