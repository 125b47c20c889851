// Conversion to SELECT goals, SQL rendering and execution against the store.

#ifndef AET_SQL_HPP
#define AET_SQL_HPP

#include <optional>
#include <string>
#include <vector>

#include "aet/formula.hpp"
#include "aet/store.hpp"
#include "aet/subst.hpp"
#include "aet/theory.hpp"

namespace aet {

struct Column {
  std::string alias;
  std::string column;
  friend bool operator==(const Column& a, const Column& b) { return a.alias == b.alias && a.column == b.column; }
};

struct SqlOperand {
  std::optional<Column> column;  // set for a column reference
  Term value;                    // otherwise a constant, number or date
  friend bool operator==(const SqlOperand& a, const SqlOperand& b) {
    return a.column == b.column && (a.column || a.value == b.value);
  }
};

struct WhereCond {
  std::string op;  // "=" or a comparison predicate name such as sql_date_=<
  SqlOperand lhs, rhs;
  friend bool operator==(const WhereCond& a, const WhereCond& b) {
    return a.op == b.op && a.lhs == b.lhs && a.rhs == b.rhs;
  }
};

struct FromItem {
  std::string relation;
  std::string alias;
  friend bool operator==(const FromItem& a, const FromItem& b) {
    return a.relation == b.relation && a.alias == b.alias;
  }
};

struct AbstractSelect {
  std::vector<Column> select;
  std::vector<FromItem> from;
  std::vector<WhereCond> where;
  friend bool operator==(const AbstractSelect& a, const AbstractSelect& b) {
    return a.select == b.select && a.from == b.from && a.where == b.where;
  }
};

struct SelectGoal {
  std::vector<std::string> vars;
  AbstractSelect select;
};

// The abstract syntax as a term: SELECT([col(t_1,c),..], FROM([alias(R,t_1),..]),
// WHERE([=(col(t_1,c),v), sql_date_=<(..), ..])). A SelectGoal appears in
// formulas as the atom trl_select([Vars..], SELECT(..)).
Term select_to_term(const AbstractSelect& s);
AbstractSelect select_from_term(const Term& t);
Formula goal_to_atom(const SelectGoal& g);
std::optional<SelectGoal> goal_from_atom(const Formula& atom);

// Converts conjunctions holding database atoms into SelectGoals, after
// rewriting arithmetic atoms there with the theory's equivalences whose
// left-hand side is an arithmetic relation. Throws UnconvertibleCondition
// when a database atom has a non-ground compound argument.
Formula to_sql(const Formula& f, const CompiledTheory& theory);

// Every SelectGoal in `f`, in left-to-right order.
std::vector<SelectGoal> select_goals(const Formula& f);

// Concrete SELECT DISTINCT text on one line.
std::string render_sql(const AbstractSelect& s);
// Dates as D-MON-YY.
std::string sql_date(const Term& date);

struct DisplayAction {
  std::vector<Term> payload;
  int ordinal = 0;
};

std::string to_string(const DisplayAction& a);

struct ExecConfig {
  Term now = Term::date(1992, 1, 1);
};

struct Outcome {
  bool truth = false;
  std::vector<Substitution> answers;  // over the free variables, duplicate-free
  std::vector<DisplayAction> actions;
};

// Evaluates a planner-accepted formula. Throws NonGroundArithmetic when an
// evaluable goal is reached with unbound arguments.
Outcome execute(const Formula& f, const RelStore& store, const CompiledTheory& theory, const ExecConfig& config = {});

// Rows of a SelectGoal, distinct, in store order.
std::vector<std::vector<Term>> run_select(const AbstractSelect& s, const RelStore& store);

Term add_days(const Term& date, int days);

}  // namespace aet

#endif  // AET_SQL_HPP
