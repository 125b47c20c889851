#include "doctest.h"

#include <fstream>
#include <sstream>

#include "aet/planner.hpp"
#include "aet/sql.hpp"
#include "aet/translator.hpp"
#include "support.hpp"

using namespace aet;
using aet::testing::F;

namespace {

const char* kBtPaymentsTarget =
    "forall([Date,TransId,AMNum,DBDate],"
    " impl(and(TRANS(TransId,DBDate,bt,AMNum), and(db_date_convert(Date,DBDate),"
    "          and(t_precedes(date([1990,1,1]),Date), t_precedes(Date,date([1990,12,31]))))),"
    "      exists([DisplayEv,DisplayT],"
    "             and(execute(DisplayEv,display([TransId,Date,bt,amount(sterling,AMNum)]),clare,DisplayT),"
    "                 t_precedes(now,DisplayT)))))";

const char* kBtPaymentsSql =
    "SELECT DISTINCT t_1.trn_id , t_1.cheque_date , t_1.amount FROM TRANS t_1 WHERE t_1.payee = 'bt' AND "
    "'1-JAN-90' <= t_1.cheque_date AND t_1.cheque_date <= '31-DEC-90'";

// Reads trans.csv directly and keeps BT payments dated in 1990.
std::vector<std::string> bt_1990_ids() {
  std::ifstream in(testing::data_path("prm/trans.csv"));
  std::string line;
  std::getline(in, line);
  std::vector<std::string> ids;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string id, date, payee, amount;
    std::getline(ss, id, ',');
    std::getline(ss, date, ',');
    std::getline(ss, payee, ',');
    std::getline(ss, amount, ',');
    if (payee == "bt" && date >= "1990-01-01" && date <= "1990-12-31") ids.push_back(id);
  }
  return ids;
}

std::vector<std::string> action_ids(const Outcome& o) {
  std::vector<std::string> ids;
  for (const auto& a : o.actions) ids.push_back(to_string(a.payload.at(0)));
  return ids;
}

}  // namespace

TEST_CASE("BT payments become a single SELECT") {
  testing::Fixture fx;
  testing::load_fixture(fx, "prm/prm.ldt");
  Formula planned = rearrange(F(kBtPaymentsTarget), fx.theory);
  Formula sql = to_sql(planned, fx.theory);
  MESSAGE(pretty(sql));
  auto goals = select_goals(sql);
  REQUIRE(goals.size() == 1);
  CHECK(goals[0].vars.size() == 3);
  CHECK(render_sql(goals[0].select) == kBtPaymentsSql);
  REQUIRE(sql.is_forall());
  CHECK(sql.body().ante().is_atom());
  CHECK(sql.body().ante().pred() == "trl_select");
  Formula again = rearrange(sql, fx.theory);
  CHECK(again == sql);
}

TEST_CASE("BT payment rows by both routes match the CSV") {
  testing::Fixture fx;
  testing::load_fixture(fx, "prm/prm.ldt");
  Formula planned = rearrange(F(kBtPaymentsTarget), fx.theory);
  Outcome direct = execute(planned, fx.store, fx.theory);
  Outcome via_sql = execute(rearrange(to_sql(planned, fx.theory), fx.theory), fx.store, fx.theory);
  auto expected = bt_1990_ids();
  REQUIRE(expected.size() == 3);
  CHECK(direct.truth);
  CHECK(via_sql.truth);
  CHECK(action_ids(direct) == expected);
  CHECK(action_ids(via_sql) == expected);
  REQUIRE(via_sql.actions.size() == direct.actions.size());
  for (std::size_t i = 0; i < direct.actions.size(); ++i)
    CHECK(to_string(direct.actions[i]) == to_string(via_sql.actions[i]));
  CHECK(to_string(direct.actions[0]) == "[1003,date([1990,1,10]),bt,amount(sterling,230)]");
}

TEST_CASE("no database atoms means no SELECT") {
  testing::Fixture fx;
  testing::load_fixture(fx, "prm/prm.ldt");
  Formula f = F("t_precedes(date([1990,1,1]),date([1990,2,1]))");
  CHECK(to_sql(f, fx.theory) == f);
}

TEST_CASE("shared variable becomes a join condition") {
  testing::Fixture fx;
  testing::load_fixture(fx, "prm/prm.ldt");
  Formula f = F("exists([I,D,J,A,B], and(TRANS(I,D,bt,A), TRANS(J,D,british_gas,B)))");
  Formula sql = to_sql(f, fx.theory);
  auto goals = select_goals(sql);
  REQUIRE(goals.size() == 1);
  const auto& w = goals[0].select.where;
  bool join = false;
  for (const auto& c : w)
    if (c.op == "=" && c.lhs.column && c.rhs.column && c.lhs.column->alias != c.rhs.column->alias) join = true;
  CHECK(join);
  CHECK(render_sql(goals[0].select).find("t_1.cheque_date = t_2.cheque_date") != std::string::npos);
  CHECK(execute(f, fx.store, fx.theory).truth == execute(sql, fx.store, fx.theory).truth);
}

TEST_CASE("rendering") {
  AbstractSelect s;
  s.select.push_back({"t_1", "c"});
  s.from.push_back({"R", "t_1"});
  CHECK(render_sql(s) == "SELECT DISTINCT t_1.c FROM R t_1");
  CHECK(sql_date(Term::date(1990, 1, 1)) == "1-JAN-90");
  CHECK(sql_date(Term::date(2005, 12, 31)) == "31-DEC-05");
  s.where.push_back({"=", SqlOperand{Column{"t_1", "c"}, {}}, SqlOperand{std::nullopt, Term::constant("o'neill")}});
  CHECK(render_sql(s) == "SELECT DISTINCT t_1.c FROM R t_1 WHERE t_1.c = 'o''neill'");
  CHECK(select_from_term(select_to_term(s)) == s);
}

TEST_CASE("execution basics") {
  testing::Fixture fx;
  testing::load_fixture(fx, "prm/prm.ldt");
  auto f = execute(F("false"), fx.store, fx.theory);
  CHECK(!f.truth);
  CHECK(f.actions.empty());
  CHECK(execute(F("exists([S], SRI_EMPLOYEE(mary,S,y))"), fx.store, fx.theory).truth);
  CHECK(!execute(F("exists([S], SRI_EMPLOYEE(gordon,S,y))"), fx.store, fx.theory).truth);
  auto open = execute(F("SRI_PROJECT_MEMBER(clare,X)"), fx.store, fx.theory);
  CHECK(open.answers.size() == 3);
  CHECK_THROWS_AS(execute(F("X > 3"), fx.store, fx.theory), NonGroundArithmetic);
  CHECK(add_days(Term::date(1990, 12, 31), 1) == Term::date(1991, 1, 1));
}
