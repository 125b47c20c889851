#include "doctest.h"

#include "aet/errors.hpp"
#include "aet/session.hpp"
#include "aet/subst.hpp"
#include "aet/syntax.hpp"
#include "gen.hpp"
#include "support.hpp"

using namespace aet;
using aet::testing::F;

namespace {

Term T(const std::string& s) { return parse_term(s); }

// Every ground term of depth <= d over {a, b, f/1, g/2}.
std::vector<Term> ground_terms(int d) {
  std::vector<Term> out{Term::constant("a"), Term::constant("b")};
  for (int i = 0; i < d; ++i) {
    std::vector<Term> next = {Term::constant("a"), Term::constant("b")};
    for (const auto& x : out) next.push_back(Term::compound("f", {x}));
    for (const auto& x : out)
      for (const auto& y : out) next.push_back(Term::compound("g", {x, y}));
    out = next;
  }
  return out;
}

Term ground_with_a(const Term& t) {
  std::vector<std::string> vs;
  collect_vars(t, vs);
  Substitution s;
  for (const auto& v : vs) s.bind(v, Term::constant("a"));
  return apply(s, t);
}

}  // namespace

TEST_CASE("unify examples") {
  auto s = unify(T("p(X,a)"), T("p(b,Y)"));
  REQUIRE(s);
  CHECK(s->size() == 2);
  CHECK(*s->find("X") == Term::constant("b"));
  CHECK(*s->find("Y") == Term::constant("a"));

  auto id = unify(F("woman1(C)"), F("woman1(C)"));
  REQUIRE(id);
  CHECK(id->empty());

  CHECK(!unify(T("X"), T("f(X)")));
  CHECK(!unify(F("p(a)"), F("q(a)")));
}

TEST_CASE("named objects unify only within a sort") {
  CHECK(unify(T("payee1#X"), T("payee1#bt")));
  CHECK(!unify(T("payee1#bt"), T("transaction1#bt")));
}

TEST_CASE("apply examples") {
  Substitution s;
  s.bind("X", T("b"));
  CHECK(apply(s, F("p(X,Y)")) == F("p(b,Y)"));
  CHECK(apply(Substitution{}, F("exists([Z], p(Z))")) == F("exists([Z], p(Z))"));

  Substitution c;
  c.bind("X", T("Y"));
  Formula out = apply(c, F("exists([Y], q(X,Y))"));
  REQUIRE(out.is_exists());
  CHECK(out.vars()[0] != "Y");
  CHECK(alpha_equal(out, F("exists([W], q(Y,W))")));
}

TEST_CASE("free variable examples") {
  CHECK(free_variables(F("exists([X], p(X,Y))")) == std::set<std::string>{"Y"});
  CHECK(free_variables(F("p(a)")).empty());
  CHECK(free_variables(F("impl(q(X), exists([X], p(X)))")) == std::set<std::string>{"X"});
}

TEST_CASE("skolemize and deskolemize examples") {
  Session session;
  auto cl = skolemize(F("exists([A,B], SRI_EMPLOYEE(clara,A,y))"), session);
  REQUIRE(cl.size() == 1);
  CHECK(cl[0].args()[0] == Term::constant("clara"));
  CHECK(cl[0].args()[1].is_skolem());
  CHECK(cl[0].args()[2] == Term::constant("y"));

  auto unit = skolemize(F("p(a)"), session);
  REQUIRE(unit.size() == 1);
  CHECK(unit[0] == F("p(a)"));

  auto shared = skolemize(F("exists([X], and(p(X), q(X)))"), session);
  REQUIRE(shared.size() == 2);
  CHECK(shared[0].args()[0] == shared[1].args()[0]);
  CHECK(shared[0].args()[0].is_skolem());
  CHECK(shared[0].args()[0].index() != cl[0].args()[1].index());

  Formula d = deskolemize({Formula::atom("SRI_EMPLOYEE", {T("clara"), Term::skolem(1), T("y")}),
                           Formula::atom("SRI_EMPLOYEE", {T("clara"), T("w"), Term::skolem(2)})});
  CHECK(alpha_equal(d, F("exists([X1,X2], and(SRI_EMPLOYEE(clara,X1,y), SRI_EMPLOYEE(clara,w,X2)))")));
  CHECK(deskolemize({F("p(a)")}) == F("p(a)"));
  CHECK(alpha_equal(deskolemize(shared), F("exists([X], and(p(X), q(X)))")));

  CHECK_THROWS_AS(skolemize(F("forall([X], p(X))"), session), UnsupportedShape);
}

TEST_CASE("text syntax") {
  CHECK(T("date([1990,1,1])").is_date());
  CHECK(T("payee1#bt").is_named());
  CHECK(T("obj(payee1,bt)").is_named());
  CHECK(T("_G").is_var());
  CHECK(F("X = Y").is_eq());
  CHECK_THROWS_AS(parse_formula("p(a"), SyntaxError);
  try {
    parse_formula("and(p(a),\n  q(b)");
  } catch (const SyntaxError& e) {
    CHECK(e.location().line == 2);
  }
}

TEST_CASE("property: unify agrees with a brute-force unifier") {
  testing::Gen gen(7);
  std::vector<std::string> vars{"X", "Y"}, consts{"a", "b"};
  auto space = ground_terms(2);
  int defined = 0, checked = 0;
  for (int i = 0; i < 300; ++i) {
    Term a = gen.term(2, vars, consts), b = gen.term(2, vars, consts);
    if (i % 3 == 0) b = apply(*unify(T("Z"), T("Z")), a);  // identical pair
    auto mgu = unify(a, b);
    bool found = false;
    std::vector<Substitution> solutions;
    for (const auto& x : space) {
      for (const auto& y : space) {
        Substitution s;
        s.bind("X", x);
        s.bind("Y", y);
        if (apply(s, a) == apply(s, b)) {
          found = true;
          if (solutions.size() < 16) solutions.push_back(s);
        }
      }
    }
    if (found) CHECK(mgu.has_value());
    if (mgu) {
      ++defined;
      CHECK(apply(*mgu, a) == apply(*mgu, b));
      CHECK(ground_with_a(apply(*mgu, a)) == ground_with_a(apply(*mgu, b)));
      CHECK(apply(*mgu, apply(*mgu, a)) == apply(*mgu, a));
      for (const auto& s : solutions) {
        Substitution inst;
        for (const auto& v : vars) CHECK(match(apply(*mgu, Term::var(v)), apply(s, Term::var(v)), inst));
      }
    }
    ++checked;
  }
  CHECK(checked == 300);
  CHECK(defined > 50);
}

TEST_CASE("property: composition and free variables") {
  testing::Gen gen(11);
  std::vector<std::string> vars{"X", "Y", "Z"}, consts{"a", "b", "c"};
  std::vector<std::pair<std::string, int>> preds{{"p", 1}, {"q", 2}, {"r", 3}};
  for (int i = 0; i < 300; ++i) {
    Substitution s1, s2;
    for (const auto& v : vars) {
      if (gen.chance(0.4)) s1.bind(v, gen.term(2, {"U", "W"}, consts));
      if (gen.chance(0.4)) s2.bind(v == "X" ? "U" : v, gen.term(2, {"W", "Z"}, consts));
    }
    Formula f = gen.formula(3, preds, vars, consts);
    CHECK(apply(compose(s1, s2), f) == apply(s2, apply(s1, f)));

    auto fv = free_variables(apply(s1, f));
    std::set<std::string> allowed;
    for (const auto& v : free_variables(f))
      if (!s1.contains(v)) allowed.insert(v);
    for (const auto& [v, t] : s1.map()) {
      if (!free_variables(f).count(v)) continue;
      std::vector<std::string> tv;
      collect_vars(t, tv);
      allowed.insert(tv.begin(), tv.end());
    }
    for (const auto& v : fv) CHECK(allowed.count(v));
  }
}

TEST_CASE("property: skolemize then deskolemize round-trips") {
  testing::Gen gen(13);
  std::vector<std::pair<std::string, int>> preds{{"p", 1}, {"q", 2}, {"SRI_EMPLOYEE", 3}};
  std::vector<std::string> consts{"a", "b"};
  Session session;
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> vs;
    int nv = 1 + gen.below(3);
    for (int k = 0; k < nv; ++k) vs.push_back("E" + std::to_string(k));
    std::vector<Formula> parts;
    int n = 1 + gen.below(3);
    for (int k = 0; k < n; ++k) parts.push_back(gen.atom(preds, vs, consts));
    Formula body = Formula::conj(parts);
    std::vector<std::string> used;
    for (const auto& v : free_variables_ordered(body)) used.push_back(v);
    Formula f = used.empty() ? body : Formula::exists(used, body);
    Formula back = deskolemize(skolemize(f, session));
    CHECK_MESSAGE(alpha_equal(normalize_vars(back), normalize_vars(f)), to_string(f), " vs ", to_string(back));
  }
}

TEST_CASE("property: printing parses back") {
  testing::Gen gen(17);
  std::vector<std::pair<std::string, int>> preds{{"p", 1}, {"q", 2}, {"sql_date_=<", 2}};
  for (int i = 0; i < 300; ++i) {
    Formula f = gen.formula(4, preds, {}, {"a", "b", "'Mixed case'"});
    CHECK(parse_formula(to_string(f)) == f);
  }
  Formula dated = F("and(t_precedes(date([1990,1,1]),D), amount(sterling, 120.5) = A)");
  CHECK(parse_formula(to_string(dated)) == dated);
}
