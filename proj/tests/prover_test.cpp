#include "doctest.h"

#include "aet/prover.hpp"
#include "aet/errors.hpp"
#include "gen.hpp"
#include "oracle.hpp"
#include "properties.hpp"
#include "support.hpp"

using namespace aet;
using aet::testing::F;

TEST_CASE("employee condition proved through a backward reading") {
  testing::Fixture fx;
  testing::load_fixture(fx, "mini/women.ldt");
  TraceSink trace;
  auto res = prove(F("employee1(c*(2))"), {F("work_on1(c*(1),c*(2),clare)")}, fx.theory, fx.store, {}, true,
                   &fx.session, &trace);
  for (auto& l : trace) MESSAGE(l);
  REQUIRE(!res.empty());
  CHECK(res[0].assumptions.empty());
  CHECK(res[0].cost == 5);
}

TEST_CASE("data availability from the date context") {
  testing::Fixture fx;
  testing::load_fixture(fx, "prm/prm.ldt");
  auto res = prove(F("transaction_data_available(c*(3))"),
                   {F("t_precedes(date([1990,1,1]),c*(3))"), F("t_precedes(c*(3),date([1990,12,31]))")}, fx.theory,
                   fx.store, {}, true, &fx.session);
  REQUIRE(!res.empty());
  CHECK(res[0].assumptions.empty());
  CHECK(res[0].cost == 5);
}

TEST_CASE("payer assumption") {
  testing::Fixture fx;
  testing::load_fixture(fx, "prm/prm.ldt");
  auto res = prove(F("c*(1) = sri"), {F("transaction(c*(1),c*(2),c*(3),c*(4),c*(5))")}, fx.theory, fx.store, {},
                   true, &fx.session);
  REQUIRE(!res.empty());
  REQUIRE(res[0].assumptions.size() == 1);
  CHECK(res[0].assumptions[0].justification == "payments_referred_to_are_from_SRI");
  CHECK(res[0].cost == 0);
}

namespace {

struct Built {
  Session session;
  CompiledTheory theory;
  RelStore store;
};

void build(Built& b, const std::string& text) {
  b.theory = compile(parse_theory(text), b.session);
  b.store = RelStore(b.theory);
}

}  // namespace

TEST_CASE("a unit clause costs one") {
  Built b;
  build(b, "hc p(a).\n");
  auto res = prove(F("p(a)"), {}, b.theory, b.store, {}, false, &b.session);
  REQUIRE(res.size() == 1);
  CHECK(res[0].cost == 1);
  CHECK(res[0].assumptions.empty());
}

TEST_CASE("planted proofs are found at the first sufficient limit") {
  auto rep = testing::planted_property(40);
  CHECK(rep.depths == 40);
  CHECK_MESSAGE(rep.wrong_cost == 0, rep.first_failure);
  CHECK_MESSAGE(rep.wrong_limit == 0, rep.first_failure);
  Built deep;
  build(deep, testing::chain_theory(41));
  CHECK_THROWS_AS(prove(F("p0(a)"), {}, deep.theory, deep.store, {}, false, &deep.session), BudgetExhausted);
  Prover p(deep.theory, deep.store, deep.session);
  CHECK(p.prove(F("p0(a)"), {}, false).empty());
  CHECK(p.stats().exhausted);
  Built b;
  build(b, testing::chain_theory(9));
  Prover nine(b.theory, b.store, b.session);
  CHECK(!nine.prove(F("p0(a)"), {}, false).empty());
  CHECK(nine.stats().iterations == 3);
}

TEST_CASE("transitivity terminates on every ground query over ten dates") {
  auto rep = testing::transitivity_property();
  MESSAGE("largest final limit ", rep.max_final_limit, " seconds ", rep.seconds);
  CHECK(rep.queries == 100);
  CHECK(rep.wrong == 0);
  CHECK(rep.over_limit == 0);
  std::vector<Term> dates;
  for (int i = 0; i < 10; ++i) dates.push_back(Term::date(1990, 1 + i, 1));
  testing::Fixture fx;
  testing::load_fixture(fx, "prm/prm.ldt");
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) {
      auto res = prove(Formula::atom("t_precedes", {dates[i], dates[j]}), {}, fx.theory, fx.store, {}, false,
                       &fx.session);
      CHECK(res.empty() == (i > j));
    }
}

TEST_CASE("ground subgoals are memoised within an iteration") {
  std::string text =
      "hc top(a) <- and(mid1(a), mid2(a)).\n"
      "hc mid1(a) <- base(a).\n"
      "hc mid2(a) <- base(a).\n"
      "hc base(a) <- leaf(a).\n"
      "hc leaf(a).\n";
  Built b;
  build(b, text);
  SearchConfig cfg;
  cfg.initial_limit = 24;
  Prover memo(b.theory, b.store, b.session, cfg);
  auto res = memo.prove(F("top(a)"), {}, false);
  REQUIRE(!res.empty());
  CHECK(memo.stats().memo_hits > 0);

  cfg.memo_fraction = 0.01;
  Prover plain(b.theory, b.store, b.session, cfg);
  auto ref = plain.prove(F("top(a)"), {}, false);
  REQUIRE(!ref.empty());
  CHECK(plain.stats().memo_hits == 0);
  CHECK(memo.stats().expansions < plain.stats().expansions);
  CHECK(res[0].binding == ref[0].binding);
}

TEST_CASE("subsumed subgoals are penalised and identical ones cut") {
  Built cut;
  build(cut, "hc p(X) <- q(X).\nhc q(a) <- p(a).\nhc q(b).\n");
  Prover pc(cut.theory, cut.store, cut.session);
  CHECK(!pc.prove(F("p(X)"), {}, false).empty());
  CHECK(pc.stats().identity_cuts > 0);

  // p(f(X)) below p(X) is an instance of its ancestor.
  Built b;
  build(b, "hc p(X) <- q(X).\nhc q(X) <- p(f(X)).\nhc q(b).\n");
  Prover p(b.theory, b.store, b.session);
  auto res = p.prove(F("p(X)"), {}, false);
  REQUIRE(!res.empty());
  CHECK(p.stats().penalties > 0);
  bool has_b = false;
  for (const auto& r : res) has_b = has_b || (r.binding.find("X") && *r.binding.find("X") == Term::constant("b"));
  CHECK(has_b);
  for (std::size_t i = 1; i < res.size(); ++i) CHECK(res[i - 1].cost <= res[i].cost);
}

TEST_CASE("refuting assumptions") {
  testing::Fixture fx;
  testing::load_fixture(fx, "prm/prm.ldt");
  CHECK(refute_assumptions({}, fx.theory, fx.store).empty());

  AssumptionInstance early;
  early.goal = F("transaction_data_available(date([1986,5,5]))");
  early.justification = "transactions_referred_to_made_between_17_8_88_and_1_4_91";
  early.kind = AssumptionKind::Limitation;
  early.cost = 15;
  AssumptionInstance in_range = early;
  in_range.goal = F("transaction_data_available(date([1990,5,5]))");
  auto v = refute_assumptions({early, in_range}, fx.theory, fx.store);
  REQUIRE(v.size() == 1);
  CHECK(v[0].goal == early.goal);

  AssumptionInstance payer;
  payer.goal = F("c*(1) = sri");
  payer.justification = "payments_referred_to_are_from_SRI";
  payer.context = {F("transaction(c*(1),c*(2),c*(3),c*(4),c*(5))")};
  CHECK(refute_assumptions({payer}, fx.theory, fx.store).empty());
}

TEST_CASE("lemmas for cheques on projects") {
  testing::Fixture fx;
  testing::load_fixture(fx, "prm/prm.ldt");
  auto lemmas = derive_lemmas(fx.theory, fx.store, "on/2");
  REQUIRE(!lemmas.empty());
  bool general = false;
  for (const auto& l : lemmas) {
    MESSAGE(to_string(l));
    CHECK(l.head.pred() == "on");
    std::vector<std::string> preds;
    for (const auto& g : l.body) preds.push_back(g.pred());
    if (preds == std::vector<std::string>{"project", "transaction"} && l.body[0].arity() == 5 &&
        l.body[1].arity() == 7) {
      general = general || (l.body[0].args()[2] == l.body[1].args()[5] && l.body[1].args()[2] == l.head.args()[0] &&
                            l.body[0].args()[1] == l.head.args()[1]);
    }
  }
  CHECK(general);
  CHECK_THROWS_AS(derive_lemmas(fx.theory, fx.store, "unicorn1/1"), NoEquivalenceForTarget);
}

TEST_CASE("lemmas for male payees hold in the forward closure") {
  testing::Fixture fx;
  testing::load_fixture(fx, "mini/payee.ldt");
  fx.store.add("PAYEE", {Term::constant("m"), Term::constant("bob")});
  fx.store.add("PAYEE", {Term::constant("w"), Term::constant("ann")});
  auto lemmas = derive_lemmas(fx.theory, fx.store, "man_MalePerson/1");
  bool expected = false;
  for (const auto& l : lemmas) {
    MESSAGE(to_string(l));
    expected = expected || (l.body.size() == 1 && l.body[0].pred() == "payee" &&
                            l.body[0].args()[0] == Term::constant("m") && l.body[0].args()[1] == l.head.args()[0]);
  }
  CHECK(expected);

  auto closure = testing::fixpoint(testing::forward_clauses(fx.theory), fx.store);
  for (const auto& l : lemmas) {
    std::vector<HornClause> with_lemma = testing::forward_clauses(fx.theory);
    with_lemma.push_back(l);
    // A sound lemma adds nothing to the closure.
    CHECK(testing::fixpoint(with_lemma, fx.store) == closure);
  }
  CHECK(closure.count(F("man_MalePerson(bob)")));
  CHECK(!closure.count(F("man_MalePerson(ann)")));
}

TEST_CASE("property: assumption-free proofs agree with the forward closure") {
  testing::Gen gen(23);
  std::vector<std::string> consts{"a", "b", "c"};
  int proved = 0;
  for (int round = 0; round < 150; ++round) {
    std::string text = "relation E/2 class database [x,y].\nrelation U/1 class database [x].\n";
    std::vector<std::pair<std::string, int>> heads{{"p", 1}, {"q", 2}, {"r", 1}};
    std::vector<std::pair<std::string, int>> bodies{{"p", 1}, {"q", 2}, {"r", 1}, {"E", 2}, {"U", 1}};
    int n = 1 + gen.below(12);
    for (int i = 0; i < n; ++i) {
      Formula h = gen.atom(heads, {"X", "Y"}, consts);
      std::vector<Formula> body;
      int k = 1 + gen.below(2);
      for (int j = 0; j < k; ++j) body.push_back(gen.atom(bodies, {"X", "Y", "Z"}, consts));
      // Range restriction: every head variable occurs in the body.
      auto bv = free_variables(Formula::conj(body));
      bool ok = true;
      for (const auto& v : free_variables(h)) ok = ok && bv.count(v);
      if (!ok) continue;
      text += "hc " + to_string(h) + " <- " + to_string(Formula::conj(body)) + ".\n";
    }
    Built b;
    build(b, text);
    int tuples = gen.below(21);
    for (int i = 0; i < tuples; ++i) {
      if (gen.chance(0.6)) b.store.add("E", {Term::constant(gen.pick(consts)), Term::constant(gen.pick(consts))});
      else b.store.add("U", {Term::constant(gen.pick(consts))});
    }
    auto closure = testing::fixpoint(b.theory.clauses, b.store);
    for (int q = 0; q < 4; ++q) {
      Formula goal = gen.atom(heads, {"W"}, consts);
      SearchConfig cfg;
      cfg.max_limit = 16;
      Prover pr(b.theory, b.store, b.session, cfg);
      auto res = pr.prove(goal, {}, false);
      for (std::size_t i = 0; i < res.size(); ++i) {
        Formula g = apply(res[i].binding, goal);
        CHECK(res[i].assumptions.empty());
        if (free_variables(g).empty()) CHECK_MESSAGE(closure.count(g), text, to_string(g));
        if (i > 0) CHECK(res[i - 1].cost <= res[i].cost);
        ++proved;
      }
    }
  }
  CHECK(proved > 50);
}
