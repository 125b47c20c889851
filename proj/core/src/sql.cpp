#include "aet/sql.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "aet/errors.hpp"
#include "aet/planner.hpp"
#include "aet/simplifier.hpp"
#include "aet/translator.hpp"

namespace aet {

namespace {

Term column_term(const Column& c) {
  return Term::compound("col", {Term::constant(c.alias), Term::constant(c.column)});
}

Column column_of(const Term& t) {
  if (!t.is_compound() || t.name() != "col" || t.args().size() != 2)
    throw Error("expected col(Alias,Column), found " + to_string(t));
  return Column{t.args()[0].name(), t.args()[1].name()};
}

Term operand_term(const SqlOperand& o) { return o.column ? column_term(*o.column) : o.value; }

SqlOperand operand_of(const Term& t) {
  SqlOperand o;
  if (t.is_compound() && t.name() == "col" && t.args().size() == 2)
    o.column = column_of(t);
  else
    o.value = t;
  return o;
}

std::vector<Term> list_items(const Term& t) {
  std::vector<Term> out;
  if (t.is_list()) {
    for (const auto& a : t.args()) out.push_back(a);
    return out;
  }
  if (t.is_constant() && t.name() == "[]") return out;
  throw Error("expected a list, found " + to_string(t));
}

}  // namespace

Term select_to_term(const AbstractSelect& s) {
  std::vector<Term> cols, from, where;
  for (const auto& c : s.select) cols.push_back(column_term(c));
  for (const auto& f : s.from)
    from.push_back(Term::compound("alias", {Term::constant(f.relation), Term::constant(f.alias)}));
  for (const auto& w : s.where) where.push_back(Term::compound(w.op, {operand_term(w.lhs), operand_term(w.rhs)}));
  return Term::compound("SELECT", {Term::list(cols), Term::compound("FROM", {Term::list(from)}),
                                   Term::compound("WHERE", {Term::list(where)})});
}

AbstractSelect select_from_term(const Term& t) {
  if (!t.is_compound() || t.name() != "SELECT" || t.args().size() != 3)
    throw Error("expected SELECT(Cols,FROM(..),WHERE(..)), found " + to_string(t));
  AbstractSelect s;
  for (const auto& c : list_items(t.args()[0])) s.select.push_back(column_of(c));
  const Term& from = t.args()[1];
  if (!from.is_compound() || from.name() != "FROM" || from.args().size() != 1) throw Error("malformed FROM");
  for (const auto& a : list_items(from.args()[0])) {
    if (!a.is_compound() || a.name() != "alias" || a.args().size() != 2) throw Error("malformed alias");
    s.from.push_back(FromItem{a.args()[0].name(), a.args()[1].name()});
  }
  const Term& where = t.args()[2];
  if (!where.is_compound() || where.name() != "WHERE" || where.args().size() != 1) throw Error("malformed WHERE");
  for (const auto& w : list_items(where.args()[0])) {
    if (!w.is_compound() || w.args().size() != 2) throw Error("malformed condition " + to_string(w));
    s.where.push_back(WhereCond{w.name(), operand_of(w.args()[0]), operand_of(w.args()[1])});
  }
  return s;
}

Formula goal_to_atom(const SelectGoal& g) {
  std::vector<Term> vs;
  for (const auto& v : g.vars) vs.push_back(Term::var(v));
  return Formula::atom("trl_select", {Term::list(vs), select_to_term(g.select)});
}

std::optional<SelectGoal> goal_from_atom(const Formula& atom) {
  if (!atom.is_atom() || atom.pred() != "trl_select" || atom.arity() != 2) return std::nullopt;
  SelectGoal g;
  for (const auto& v : list_items(atom.args()[0])) {
    if (!v.is_var()) throw Error("trl_select expects variables, found " + to_string(v));
    g.vars.push_back(v.name());
  }
  g.select = select_from_term(atom.args()[1]);
  return g;
}

std::string sql_date(const Term& d) {
  static const char* months[] = {"JAN", "FEB", "MAR", "APR", "MAY", "JUN",
                                 "JUL", "AUG", "SEP", "OCT", "NOV", "DEC"};
  std::ostringstream os;
  int yy = d.year() % 100;
  os << d.day() << "-" << months[(d.month() + 11) % 12] << "-" << (yy < 10 ? "0" : "") << yy;
  return os.str();
}

namespace {

std::string sql_operand(const SqlOperand& o) {
  if (o.column) return o.column->alias + "." + o.column->column;
  const Term& t = o.value;
  if (t.is_number()) return to_string(t);
  if (t.is_date()) return "'" + sql_date(t) + "'";
  std::string s = t.is_constant() ? t.name() : to_string(t);
  std::string q;
  for (char c : s) {
    if (c == '\'') q += '\'';
    q += c;
  }
  return "'" + q + "'";
}

std::string sql_op(const std::string& op) {
  if (op == "=") return "=";
  if (op == "sql_date_=<" || op == "=<" || op == "t_precedes") return "<=";
  if (op == "sql_date_<" || op == "<" || op == "t_before") return "<";
  if (op == ">" || op == ">=") return op;
  if (op == "\\=") return "<>";
  throw Error("no SQL operator for " + op);
}

}  // namespace

std::string render_sql(const AbstractSelect& s) {
  std::ostringstream os;
  os << "SELECT DISTINCT ";
  for (std::size_t i = 0; i < s.select.size(); ++i)
    os << (i ? " , " : "") << s.select[i].alias << "." << s.select[i].column;
  os << " FROM ";
  for (std::size_t i = 0; i < s.from.size(); ++i) os << (i ? " , " : "") << s.from[i].relation << " " << s.from[i].alias;
  for (std::size_t i = 0; i < s.where.size(); ++i) {
    const auto& w = s.where[i];
    os << (i ? " AND " : " WHERE ") << sql_operand(w.lhs) << " " << sql_op(w.op) << " " << sql_operand(w.rhs);
  }
  return os.str();
}

namespace {

// Equivalences whose left-hand side is a single arithmetic atom.
std::vector<const CompiledEquiv*> backend_rules(const CompiledTheory& th) {
  std::vector<const CompiledEquiv*> out;
  for (const auto& e : th.equivs)
    if (e.lhs.size() == 1 && e.lhs_vars.empty() && e.conds.is_true() && th.is_arithmetic(e.lhs[0]))
      out.push_back(&e);
  return out;
}

class Converter {
 public:
  explicit Converter(const CompiledTheory& th) : th_(th), rules_(backend_rules(th)) {}

  // Rewrites arithmetic atoms in conjunctions that hold database atoms.
  Formula backend(const Formula& f, bool& changed) {
    switch (f.kind()) {
      case FormulaKind::And:
      case FormulaKind::Atom: {
        auto items = conjuncts(f);
        bool has_db = std::any_of(items.begin(), items.end(), [&](const Formula& g) {
          return g.is_atom() && th_.is_database(g);
        });
        for (auto& g : items) {
          if (has_db && g.is_atom() && th_.is_arithmetic(g)) {
            if (auto r = rewrite(g)) {
              g = *r;
              changed = true;
            }
          } else if (!g.is_atom()) {
            g = backend(g, changed);
          }
        }
        return Formula::conj(items);
      }
      case FormulaKind::Exists:
        return Formula::exists(f.vars(), backend(f.body(), changed));
      case FormulaKind::Forall:
        return Formula::forall(f.vars(), backend(f.body(), changed));
      case FormulaKind::Impl:
        return Formula::impl(backend(f.ante(), changed), backend(f.cons(), changed));
      default:
        return f;
    }
  }

  Formula group(const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::And:
      case FormulaKind::Atom:
        return group_conj(conjuncts(f));
      case FormulaKind::Exists:
        return Formula::exists(f.vars(), group(f.body()));
      case FormulaKind::Forall:
        return Formula::forall(f.vars(), group(f.body()));
      case FormulaKind::Impl:
        return Formula::impl(group(f.ante()), group(f.cons()));
      default:
        return f;
    }
  }

 private:
  std::optional<Formula> rewrite(const Formula& atom) {
    for (const auto* e : rules_) {
      Substitution theta;
      if (!match(e->lhs[0], atom, theta)) continue;
      Substitution fresh;
      for (const auto& v : e->rhs_vars) fresh.set_raw(v, Term::var(session_.fresh_var(v)));
      Formula rhs = e->rhs;
      if (rhs.is_exists()) {
        std::vector<std::string> vs;
        for (const auto& v : rhs.vars()) vs.push_back(fresh.find(v) ? fresh.find(v)->name() : v);
        rhs = Formula::exists(vs, apply(fresh, rhs.body()));
      }
      return apply(theta, rhs);
    }
    return std::nullopt;
  }

  bool where_operand(const Term& t, const std::map<std::string, Column>& cols) const {
    if (t.is_var()) return cols.count(t.name()) != 0;
    return t.ground() && (t.is_constant() || t.is_number() || t.is_date());
  }

  SqlOperand operand(const Term& t, const std::map<std::string, Column>& cols) const {
    SqlOperand o;
    if (t.is_var())
      o.column = cols.at(t.name());
    else
      o.value = t;
    return o;
  }

  Formula group_conj(std::vector<Formula> items) {
    std::vector<std::size_t> db;
    for (std::size_t i = 0; i < items.size(); ++i)
      if (items[i].is_atom() && th_.is_database(items[i])) db.push_back(i);
    if (db.empty()) {
      for (auto& g : items)
        if (!g.is_atom()) g = group(g);
      return Formula::conj(items);
    }
    SelectGoal goal;
    std::map<std::string, Column> cols;
    std::vector<WhereCond> fixed;
    for (std::size_t i : db) {
      const Formula& a = items[i];
      const RelationDecl* decl = th_.relation(a.pred(), a.arity());
      std::string alias = "t_" + std::to_string(++aliases_);
      goal.select.from.push_back(FromItem{a.pred(), alias});
      for (std::size_t k = 0; k < a.arity(); ++k) {
        Column c{alias, k < decl->columns.size() ? decl->columns[k] : "c" + std::to_string(k + 1)};
        const Term& t = a.args()[k];
        if (t.is_var()) {
          auto it = cols.find(t.name());
          if (it == cols.end()) {
            cols[t.name()] = c;
            goal.vars.push_back(t.name());
            goal.select.select.push_back(c);
          } else {
            fixed.push_back(WhereCond{"=", SqlOperand{it->second, {}}, SqlOperand{c, {}}});
          }
        } else if (t.ground()) {
          fixed.push_back(WhereCond{"=", SqlOperand{c, {}}, SqlOperand{std::nullopt, t}});
        } else {
          throw UnconvertibleCondition("database argument " + to_string(t) + " of " + to_string(a) +
                                       " is neither a variable nor ground");
        }
      }
    }
    goal.select.where = fixed;
    std::vector<bool> used(items.size(), false);
    for (std::size_t i : db) used[i] = true;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const Formula& g = items[i];
      if (used[i]) continue;
      bool cmp = g.is_atom() && is_comparison_pred(g.pred(), g.arity());
      if (!cmp && !g.is_eq()) continue;
      const Term& l = g.is_eq() ? g.lhs() : g.args()[0];
      const Term& r = g.is_eq() ? g.rhs() : g.args()[1];
      if (!where_operand(l, cols) || !where_operand(r, cols)) continue;
      if (!l.is_var() && !r.is_var()) continue;
      goal.select.where.push_back(WhereCond{g.is_eq() ? "=" : g.pred(), operand(l, cols), operand(r, cols)});
      used[i] = true;
    }
    std::vector<Formula> out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i == db.front()) out.push_back(goal_to_atom(goal));
      if (used[i]) continue;
      out.push_back(items[i].is_atom() ? items[i] : group(items[i]));
    }
    return Formula::conj(out);
  }

  const CompiledTheory& th_;
  std::vector<const CompiledEquiv*> rules_;
  Session session_;
  int aliases_ = 0;
};

void collect_goals(const Formula& f, std::vector<SelectGoal>& out) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      if (auto g = goal_from_atom(f)) out.push_back(*g);
      return;
    case FormulaKind::And:
    case FormulaKind::Impl:
      collect_goals(f.left(), out);
      collect_goals(f.right(), out);
      return;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      collect_goals(f.body(), out);
      return;
    default:
      return;
  }
}

}  // namespace

Formula to_sql(const Formula& f, const CompiledTheory& theory) {
  Converter conv(theory);
  SimplifyOptions opt;
  opt.redundancy = false;
  Formula g = f;
  for (int round = 0; round < 8; ++round) {
    bool changed = false;
    g = conv.backend(g, changed);
    if (!changed) break;
    g = tidy_names(simplify(g, theory, opt));
  }
  return cleanup(conv.group(g));
}

std::vector<SelectGoal> select_goals(const Formula& f) {
  std::vector<SelectGoal> out;
  collect_goals(f, out);
  return out;
}

std::string to_string(const DisplayAction& a) { return to_string(Term::list(a.payload)); }

Term add_days(const Term& date, int days) {
  using namespace std::chrono;
  year_month_day d{year{date.year()}, month{static_cast<unsigned>(date.month())},
                   day{static_cast<unsigned>(date.day())}};
  year_month_day n{sys_days{d} + std::chrono::days{days}};
  return Term::date(static_cast<int>(n.year()), static_cast<int>(static_cast<unsigned>(n.month())),
                    static_cast<int>(static_cast<unsigned>(n.day())));
}

std::vector<std::vector<Term>> run_select(const AbstractSelect& s, const RelStore& store) {
  std::map<std::string, std::size_t> slot;
  std::vector<const std::vector<Tuple>*> tables;
  std::vector<const RelationDecl*> decls;
  for (std::size_t i = 0; i < s.from.size(); ++i) {
    slot[s.from[i].alias] = i;
    tables.push_back(&store.tuples(s.from[i].relation));
    decls.push_back(store.decl(s.from[i].relation));
    if (!decls.back()) throw Error("unknown relation " + s.from[i].relation);
  }
  auto index_of = [&](const Column& c) {
    std::size_t k = slot.at(c.alias);
    const auto& names = decls[k]->columns;
    auto it = std::find(names.begin(), names.end(), c.column);
    if (it == names.end()) throw Error("unknown column " + c.alias + "." + c.column);
    return std::make_pair(k, static_cast<std::size_t>(it - names.begin()));
  };
  std::vector<std::pair<std::size_t, std::size_t>> sel;
  for (const auto& c : s.select) sel.push_back(index_of(c));
  struct Cond {
    std::string op;
    std::optional<std::pair<std::size_t, std::size_t>> l, r;
    Term lv, rv;
  };
  std::vector<Cond> conds;
  for (const auto& w : s.where) {
    Cond c{w.op, {}, {}, w.lhs.value, w.rhs.value};
    if (w.lhs.column) c.l = index_of(*w.lhs.column);
    if (w.rhs.column) c.r = index_of(*w.rhs.column);
    conds.push_back(c);
  }
  std::vector<const Tuple*> row(tables.size());
  std::vector<std::vector<Term>> out;
  std::set<std::vector<Term>> seen;
  std::function<void(std::size_t)> loop = [&](std::size_t i) {
    if (i == tables.size()) {
      for (const auto& c : conds) {
        Term a = c.l ? (*row[c.l->first])[c.l->second] : c.lv;
        Term b = c.r ? (*row[c.r->first])[c.r->second] : c.rv;
        if (c.op == "=") {
          if (a != b) return;
          continue;
        }
        if (eval_builtin(Formula::atom(c.op, {a, b})).kind != BuiltinOutcome::Succeed) return;
      }
      std::vector<Term> r;
      for (auto [k, j] : sel) r.push_back((*row[k])[j]);
      if (seen.insert(r).second) out.push_back(r);
      return;
    }
    for (const auto& t : *tables[i]) {
      row[i] = &t;
      loop(i + 1);
    }
  };
  loop(0);
  return out;
}

namespace {

class Executor {
 public:
  using K = std::function<bool(const Substitution&)>;

  Executor(const RelStore& store, const CompiledTheory& th, const ExecConfig& cfg, Outcome& out)
      : store_(store), th_(th), cfg_(cfg), out_(out) {}

  // Returns false when the continuation asked to stop.
  bool solve(const Formula& f, const Substitution& s, const K& k) {
    switch (f.kind()) {
      case FormulaKind::True:
        return k(s);
      case FormulaKind::False:
      case FormulaKind::Mismatch:
        return true;
      case FormulaKind::Equality: {
        Substitution t = s;
        if (!unify(apply(s, f.lhs()), apply(s, f.rhs()), t)) return true;
        return k(t);
      }
      case FormulaKind::Atom:
        return solve_atom(f, s, k);
      case FormulaKind::And:
        return solve(f.left(), s, [&](const Substitution& s1) { return solve(f.right(), s1, k); });
      case FormulaKind::Exists: {
        Formula body = fresh(f.vars(), f.body());
        std::vector<std::string> outer;
        for (const auto& [v, t] : s.map()) outer.push_back(v);
        std::set<std::string> seen;
        auto fv = free_variables(f);
        return solve(body, s, [&](const Substitution& s1) {
          std::ostringstream key;
          for (const auto& v : fv) key << v << "=" << apply(s1, Term::var(v)) << ";";
          if (!seen.insert(key.str()).second) return true;
          return k(s1);
        });
      }
      case FormulaKind::Forall:
        if (!f.body().is_impl()) throw Error("universal without implication cannot be evaluated");
        return solve_impl(fresh(f.vars(), f.body()), s, k);
      case FormulaKind::Impl:
        return solve_impl(f, s, k);
    }
    return true;
  }

 private:
  Formula fresh(const std::vector<std::string>& vars, const Formula& body) {
    Substitution r;
    for (const auto& v : vars) r.set_raw(v, Term::var(v + "#" + std::to_string(++counter_)));
    return apply(r, body);
  }

  bool solve_impl(const Formula& f, const Substitution& s, const K& k) {
    bool ok = true;
    solve(f.ante(), s, [&](const Substitution& s1) {
      bool found = false;
      solve(f.cons(), s1, [&](const Substitution&) {
        found = true;
        return false;
      });
      if (!found) ok = false;
      return found;
    });
    return ok ? k(s) : true;
  }

  bool solve_atom(const Formula& f, const Substitution& s, const K& k) {
    if (auto g = goal_from_atom(f)) {
      std::vector<Term> vs;
      for (const auto& v : g->vars) vs.push_back(apply(s, Term::var(v)));
      for (const auto& row : run_select(g->select, store_)) {
        Substitution t = s;
        if (unify_args(vs, row, t) && !k(t)) return false;
      }
      return true;
    }
    Formula a = apply(s, f);
    if (th_.is_database(a) || (!th_.is_declared(a) && store_.decl(a.pred()))) {
      for (const auto& row : store_.tuples(a.pred())) {
        Substitution t = s;
        if (unify_args(a.args(), row, t) && !k(t)) return false;
      }
      return true;
    }
    if (is_builtin(a.pred(), a.arity())) {
      auto o = eval_builtin(a, &cfg_.now);
      if (o.kind == BuiltinOutcome::Unknown)
        throw NonGroundArithmetic("cannot evaluate " + to_string(a) + " with unbound arguments");
      if (o.kind == BuiltinOutcome::Fail) return true;
      Substitution t = s;
      for (const auto& [v, x] : o.binding.map())
        if (!t.bind(v, x)) return true;
      return k(t);
    }
    if (th_.is_executable(a)) return perform(a, s, k);
    throw NonGroundArithmetic("no evaluation procedure for " + a.key());
  }

  bool perform(const Formula& a, const Substitution& s, const K& k) {
    if (a.arity() < 2 || !a.args()[1].ground())
      throw NonGroundArithmetic("action of " + to_string(a) + " is not instantiated");
    const Term& action = a.args()[1];
    DisplayAction act;
    if (action.is_compound() && action.name() == "display" && action.args().size() == 1 &&
        (action.args()[0].is_list() || action.args()[0].is_constant()))
      act.payload = list_items(action.args()[0]);
    else
      act.payload = {action};
    act.ordinal = static_cast<int>(out_.actions.size()) + 1;
    out_.actions.push_back(act);
    Substitution t = s;
    std::vector<Term> result = a.args();
    result[0] = Term::constant("event_" + std::to_string(act.ordinal));
    if (a.arity() >= 4) result[3] = add_days(cfg_.now, 1);
    if (!unify_args(a.args(), result, t)) return true;
    return k(t);
  }

  const RelStore& store_;
  const CompiledTheory& th_;
  const ExecConfig& cfg_;
  Outcome& out_;
  long counter_ = 0;
};

}  // namespace

Outcome execute(const Formula& f, const RelStore& store, const CompiledTheory& theory, const ExecConfig& config) {
  Outcome out;
  Executor ex(store, theory, config, out);
  std::vector<std::string> fv = free_variables_ordered(f);
  std::set<std::string> seen;
  ex.solve(f, Substitution{}, [&](const Substitution& s) {
    out.truth = true;
    Substitution ans;
    std::ostringstream key;
    for (const auto& v : fv) {
      Term t = apply(s, Term::var(v));
      ans.set_raw(v, t);
      key << t << ";";
    }
    if (seen.insert(key.str()).second) out.answers.push_back(ans);
    return !fv.empty();
  });
  return out;
}

}  // namespace aet
