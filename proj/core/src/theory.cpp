#include "aet/theory.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "aet/subst.hpp"
#include "aet/syntax.hpp"

namespace aet {

std::string to_string(AssumptionKind k) {
  switch (k) {
    case AssumptionKind::Specialization:
      return "specialization";
    case AssumptionKind::Limitation:
      return "limitation";
    case AssumptionKind::Approximation:
      return "approximation";
  }
  return "?";
}

std::string to_string(RelationClass c) {
  switch (c) {
    case RelationClass::Database:
      return "database";
    case RelationClass::Arithmetic:
      return "arithmetic";
    case RelationClass::Executable:
      return "executable";
  }
  return "?";
}

std::string to_string(ClauseOrigin o) {
  switch (o) {
    case ClauseOrigin::User:
      return "user";
    case ClauseOrigin::Normal:
      return "normal";
    case ClauseOrigin::Backward:
      return "backward";
    case ClauseOrigin::FunctionExpansion:
      return "function";
  }
  return "?";
}

std::string to_string(const HornClause& c) {
  std::string s = to_string(c.head);
  if (!c.body.empty()) s += " <- " + to_string(Formula::conj(c.body));
  return s;
}

bool Theory::empty() const {
  return equivs.empty() && clauses.empty() && functions.empty() && assumables.empty() && negs.empty() &&
         call_patterns.empty() && quick_tests.empty() && relations.empty();
}

namespace {

const ParseOptions kUserInput{false};

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {"equiv",     "hc",        "function",   "assumable", "neg",
                                           "call_pattern", "quick_fail", "quick_det", "relation",  "stratum"};
  return kw.count(s) != 0;
}

[[noreturn]] void bad(const Location& loc, const std::string& expected, const std::string& found = {}) {
  throw SyntaxError(loc, expected, found);
}

Formula atom_of(const Raw& r, const std::string& what) {
  Formula f = to_formula(r, kUserInput);
  if (!f.is_atom()) bad(r.loc, what, to_string(f));
  return f;
}

std::vector<Formula> body_conjuncts(const Formula& f, const Location& loc) {
  std::vector<Formula> out;
  for (const Formula& c : conjuncts(f)) {
    if (!c.is_atom() && !c.is_eq()) bad(loc, "a conjunction of atoms and equalities", to_string(c));
    out.push_back(c);
  }
  return out;
}

AssumptionKind parse_kind(const Raw& r) {
  if (r.kind == Raw::Ident && r.args.empty()) {
    if (r.name == "specialization" || r.name == "specialisation") return AssumptionKind::Specialization;
    if (r.name == "limitation") return AssumptionKind::Limitation;
    if (r.name == "approximation") return AssumptionKind::Approximation;
  }
  bad(r.loc, "specialization, limitation or approximation", r.name);
}

std::string justification_text(const Raw& r) {
  // Justifications are tags; anything that prints as a term is accepted.
  Term t = to_term(r, kUserInput);
  if (t.is_constant()) return t.name();
  return to_string(t);
}

class TheoryParser {
 public:
  TheoryParser(Theory& th, std::string_view text, const std::string& file) : th_(th), p_(text, file) {}

  void run() {
    while (!p_.at_end()) statement();
  }

 private:
  void end() { p_.expect(Token::Punct, ".", "'.' ending the declaration"); }

  void check_arity(const Formula& f, const Location& loc) {
    std::vector<Formula> atoms;
    collect_atoms(f, atoms);
    for (const Formula& a : atoms) {
      for (const RelationDecl& r : th_.relations) {
        if (r.name == a.pred() && r.arity != a.arity())
          throw ArityMismatch(loc.str() + ": " + a.pred() + " used with arity " + std::to_string(a.arity()) +
                              " but declared with arity " + std::to_string(r.arity));
      }
    }
  }

  void statement() {
    Token first = p_.peek();
    Location loc = first.loc;
    if (first.kind == Token::Ident && !first.call && is_keyword(first.text)) {
      p_.next();
      keyword_statement(first.text, loc);
      return;
    }
    Raw r = p_.expr(1200);
    end();
    bare_statement(r, loc);
  }

  void keyword_statement(const std::string& kw, const Location& loc) {
    if (kw == "stratum") {
      p_.expr(999);  // accepted and ignored
      end();
      return;
    }
    if (kw == "equiv") {
      Raw r = p_.expr(1200);
      end();
      if (r.kind == Raw::Op && r.name == "<-" && r.args[0].kind == Raw::Op && r.args[0].name == "<->")
        add_equiv(r.args[0].args[0], r.args[0].args[1], &r.args[1], loc);
      else if (r.kind == Raw::Op && r.name == "<->")
        add_equiv(r.args[0], r.args[1], nullptr, loc);
      else
        bad(loc, "LHS <-> RHS");
      return;
    }
    if (kw == "hc") {
      Raw r = p_.expr(1200);
      end();
      if (r.kind == Raw::Op && r.name == "<-")
        add_hc(r.args[0], &r.args[1], loc);
      else
        add_hc(r, nullptr, loc);
      return;
    }
    if (kw == "neg") {
      Raw r = p_.expr(1200);
      end();
      if (r.kind != Raw::Op || r.name != "<-") bad(loc, "GOAL <- BODY");
      add_neg(r.args[0], r.args[1], loc);
      return;
    }
    if (kw == "function" || kw == "call_pattern") {
      Raw templ = p_.expr(999);
      p_.expect(Token::Punct, ",", "','");
      Raw arrow = p_.expr(1200);
      end();
      if (arrow.kind != Raw::Op || arrow.name != "->") bad(arrow.loc, "[...] -> [...]");
      if (kw == "function")
        add_function(templ, arrow.args[0], arrow.args[1], loc);
      else
        add_call_pattern(templ, arrow.args[0], arrow.args[1], loc);
      return;
    }
    if (kw == "assumable") {
      std::vector<Raw> parts;
      parts.push_back(p_.expr(999));
      while (p_.accept(Token::Punct, ",")) parts.push_back(p_.expr(999));
      end();
      add_assumable(parts, loc);
      return;
    }
    if (kw == "quick_fail" || kw == "quick_det") {
      Raw goal = p_.expr(999);
      p_.expect(Token::Ident, "when", "'when'");
      Raw bind = p_.expr(999);
      end();
      add_quick(kw == "quick_fail", goal, bind, loc);
      return;
    }
    if (kw == "relation") {
      Raw sig = p_.expr(999);
      if (sig.kind != Raw::Op || sig.name != "/" || (sig.args[0].kind != Raw::Ident && sig.args[0].kind != Raw::Var) || sig.args[1].kind != Raw::Num)
        bad(sig.loc, "NAME/ARITY");
      p_.expect(Token::Ident, "class", "'class'");
      Token cls = p_.expect(Token::Ident, {}, "a relation class");
      std::vector<std::string> cols;
      if (p_.at(Token::Punct, "[")) {
        Raw list = p_.expr(999);
        for (const Raw& c : list.args) {
          if (c.kind != Raw::Ident || !c.args.empty()) bad(c.loc, "a column name");
          cols.push_back(c.name);
        }
      }
      end();
      RelationDecl d;
      d.name = sig.args[0].name;
      d.arity = static_cast<std::size_t>(sig.args[1].num);
      d.columns = std::move(cols);
      d.loc = loc;
      if (cls.text == "database")
        d.cls = RelationClass::Database;
      else if (cls.text == "arithmetic")
        d.cls = RelationClass::Arithmetic;
      else if (cls.text == "executable")
        d.cls = RelationClass::Executable;
      else
        bad(cls.loc, "database, arithmetic or executable", cls.text);
      if (d.cls == RelationClass::Database && d.columns.size() != d.arity)
        bad(loc, std::to_string(d.arity) + " column names");
      if (!d.columns.empty() && d.columns.size() != d.arity) bad(loc, std::to_string(d.arity) + " column names");
      for (const RelationDecl& r : th_.relations) {
        if (r.name == d.name && r.arity != d.arity)
          throw ArityMismatch(loc.str() + ": relation " + d.name + " redeclared with a different arity");
      }
      th_.relations.push_back(std::move(d));
      return;
    }
  }

  void bare_statement(const Raw& r, const Location& loc) {
    if (r.kind == Raw::Op && r.name == "<-") {
      const Raw& l = r.args[0];
      if (l.kind == Raw::Op && l.name == "<->") {
        add_equiv(l.args[0], l.args[1], &r.args[1], loc);
        return;
      }
      if (l.kind == Raw::Ident && (l.name == "neg" || l.name == "negation_of") && l.args.size() == 1) {
        add_neg(l.args[0], r.args[1], loc);
        return;
      }
      add_hc(l, &r.args[1], loc);
      return;
    }
    if (r.kind == Raw::Op && r.name == "<->") {
      add_equiv(r.args[0], r.args[1], nullptr, loc);
      return;
    }
    if (r.kind == Raw::Ident && !r.quoted) {
      if (r.name == "function" && r.args.size() == 2) {
        const Raw& arrow = r.args[1];
        if (arrow.kind != Raw::Op || arrow.name != "->") bad(arrow.loc, "[...] -> [...]");
        add_function(r.args[0], arrow.args[0], arrow.args[1], loc);
        return;
      }
      if (r.name == "call_pattern" && r.args.size() == 3) {
        add_call_pattern(r.args[0], r.args[1], r.args[2], loc);
        return;
      }
      if (r.name == "assumable" && r.args.size() == 5) {
        add_assumable(r.args, loc);
        return;
      }
    }
    add_hc(r, nullptr, loc);
  }

  void add_equiv(const Raw& lhs_raw, const Raw& rhs_raw, const Raw* conds_raw, const Location& loc) {
    EquivRule e;
    e.loc = loc;
    Formula lhs = to_formula(lhs_raw, kUserInput);
    if (lhs.is_exists()) {
      e.lhs_vars = lhs.vars();
      lhs = lhs.body();
    }
    for (const Formula& c : conjuncts(lhs)) {
      if (!c.is_atom()) bad(loc, "a conjunction of atoms on the left-hand side", to_string(c));
      e.lhs.push_back(c);
    }
    if (e.lhs.empty()) bad(loc, "a non-empty left-hand side");
    for (const std::string& v : e.lhs_vars) {
      bool found = false;
      for (const Formula& a : e.lhs)
        for (const Term& t : a.args())
          if (occurs(v, t)) found = true;
      if (!found) bad(loc, "existential variable " + v + " to occur on the left-hand side");
    }
    e.rhs = to_formula(rhs_raw, kUserInput);
    e.conds = conds_raw ? Formula::conj(body_conjuncts(to_formula(*conds_raw, kUserInput), loc)) : Formula::truth();
    check_arity(lhs, loc);
    check_arity(e.rhs, loc);
    check_arity(e.conds, loc);
    e.ordinal = th_.next_ordinal++;
    th_.equivs.push_back(std::move(e));
  }

  void add_hc(const Raw& head_raw, const Raw* body_raw, const Location& loc) {
    HornClause c;
    c.loc = loc;
    c.head = atom_of(head_raw, "an atomic clause head");
    if (c.head.pred() == "=") bad(loc, "a head other than '='");
    if (body_raw) c.body = body_conjuncts(to_formula(*body_raw, kUserInput), loc);
    check_arity(c.head, loc);
    for (const Formula& b : c.body) check_arity(b, loc);
    c.ordinal = th_.next_ordinal++;
    th_.clauses.push_back(std::move(c));
  }

  void add_neg(const Raw& goal_raw, const Raw& body_raw, const Location& loc) {
    NegRule n;
    n.loc = loc;
    const Raw* g = &goal_raw;
    if (g->kind == Raw::Ident && (g->name == "neg" || g->name == "negation_of") && g->args.size() == 1) g = &g->args[0];
    n.goal = to_formula(*g, kUserInput);
    if (!n.goal.is_atom() && !n.goal.is_eq()) bad(loc, "an atomic goal under neg", to_string(n.goal));
    n.body = Formula::conj(body_conjuncts(to_formula(body_raw, kUserInput), loc));
    n.ordinal = th_.next_ordinal++;
    th_.negs.push_back(std::move(n));
  }

  std::vector<std::string> var_names(const Raw& list) {
    if (list.kind != Raw::List) bad(list.loc, "a variable list");
    std::vector<std::string> out;
    for (const Raw& v : list.args) {
      if (v.kind != Raw::Var) bad(v.loc, "a variable");
      out.push_back(v.name);
    }
    return out;
  }

  void add_function(const Raw& templ_raw, const Raw& from_raw, const Raw& to_raw, const Location& loc) {
    FunctionDecl f;
    f.loc = loc;
    f.templ = atom_of(templ_raw, "a template atom");
    std::vector<std::string> tv;
    for (const Term& t : f.templ.args()) {
      if (!t.is_var()) bad(loc, "a template with variable arguments", to_string(t));
      for (const auto& x : tv)
        if (x == t.name()) bad(loc, "distinct template variables", t.name());
      tv.push_back(t.name());
    }
    f.from = var_names(from_raw);
    f.to = var_names(to_raw);
    auto pos = [&](const std::string& v) -> std::size_t {
      for (std::size_t i = 0; i < tv.size(); ++i)
        if (tv[i] == v) return i;
      bad(loc, "a template variable", v);
    };
    for (const auto& v : f.from) f.from_pos.push_back(pos(v));
    for (const auto& v : f.to) {
      f.to_pos.push_back(pos(v));
      if (std::find(f.from.begin(), f.from.end(), v) != f.from.end()) bad(loc, "disjoint from and to lists", v);
    }
    check_arity(f.templ, loc);
    for (const FunctionDecl& g : th_.functions) {
      if (g.templ.key() == f.templ.key() && std::set<std::size_t>(g.from_pos.begin(), g.from_pos.end()) ==
                                                std::set<std::size_t>(f.from_pos.begin(), f.from_pos.end()))
        throw DuplicateFunctionDecl(loc.str() + ": function declaration for " + f.templ.key() +
                                    " repeats the one at " + g.loc.str());
    }
    f.ordinal = th_.next_ordinal++;
    th_.functions.push_back(std::move(f));
  }

  std::set<std::size_t> positions(const Raw& list, const Formula& templ) {
    if (list.kind != Raw::List && !(list.kind == Raw::Ident && list.name == "[]" && list.args.empty()))
      bad(list.loc, "a position list");
    std::set<std::size_t> out;
    for (const Raw& p : list.args) {
      if (p.kind == Raw::Num) {
        auto i = static_cast<std::size_t>(p.num);
        if (i < 1 || i > templ.arity()) bad(p.loc, "an argument position within the arity");
        out.insert(i - 1);
      } else if (p.kind == Raw::Var) {
        bool found = false;
        for (std::size_t i = 0; i < templ.arity(); ++i)
          if (templ.args()[i].is_var() && templ.args()[i].name() == p.name) {
            out.insert(i);
            found = true;
          }
        if (!found) bad(p.loc, "a template variable", p.name);
      } else {
        bad(p.loc, "an argument position");
      }
    }
    return out;
  }

  void add_call_pattern(const Raw& templ_raw, const Raw& in_raw, const Raw& out_raw, const Location& loc) {
    CallPattern c;
    c.loc = loc;
    c.templ = atom_of(templ_raw, "a template atom");
    c.in = positions(in_raw, c.templ);
    c.out = positions(out_raw, c.templ);
    for (std::size_t i : c.in)
      if (c.out.count(i)) bad(loc, "disjoint in and out positions");
    check_arity(c.templ, loc);
    c.ordinal = th_.next_ordinal++;
    th_.call_patterns.push_back(std::move(c));
  }

  void add_assumable(const std::vector<Raw>& parts, const Location& loc) {
    if (parts.size() != 5) bad(loc, "GOAL, COST, JUSTIFICATION, KIND, CONDITION");
    AssumableDecl a;
    a.loc = loc;
    a.goal = to_formula(parts[0], kUserInput);
    if (!a.goal.is_atom() && !a.goal.is_eq()) bad(loc, "an atomic assumable goal", to_string(a.goal));
    if (parts[1].kind != Raw::Num || parts[1].num < 0) bad(parts[1].loc, "a non-negative cost");
    a.cost = static_cast<int>(parts[1].num);
    a.justification = justification_text(parts[2]);
    a.kind = parse_kind(parts[3]);
    a.condition = to_formula(parts[4], kUserInput);
    if (!a.condition.is_atom() && !a.condition.is_eq() && !a.condition.is_true())
      bad(loc, "an atomic condition", to_string(a.condition));
    check_arity(a.goal, loc);
    check_arity(a.condition, loc);
    a.ordinal = th_.next_ordinal++;
    th_.assumables.push_back(std::move(a));
  }

  void add_quick(bool failure, const Raw& goal_raw, const Raw& bind_raw, const Location& loc) {
    QuickTest q;
    q.loc = loc;
    q.failure = failure;
    q.goal = atom_of(goal_raw, "an atomic goal");
    if (bind_raw.kind != Raw::List) bad(bind_raw.loc, "a binding list");
    for (const Raw& b : bind_raw.args) {
      BindingCondition c;
      if (b.kind == Raw::Ident && b.args.empty() && !b.quoted && b.name == "ground")
        c.kind = BindingCondition::Ground;
      else if (b.kind == Raw::Ident && b.args.empty() && !b.quoted && b.name == "any")
        c.kind = BindingCondition::Any;
      else {
        c.kind = BindingCondition::Equals;
        c.term = to_term(b, kUserInput);
      }
      q.binding.push_back(std::move(c));
    }
    if (q.binding.size() != q.goal.arity()) bad(loc, std::to_string(q.goal.arity()) + " binding conditions");
    q.ordinal = th_.next_ordinal++;
    th_.quick_tests.push_back(std::move(q));
  }

  Theory& th_;
  Parser p_;
};

}  // namespace

void parse_theory_into(Theory& into, std::string_view text, const std::string& file) {
  TheoryParser(into, text, file).run();
}

Theory parse_theory(std::string_view text, const std::string& file) {
  Theory th;
  parse_theory_into(th, text, file);
  return th;
}

Theory load_theory_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open theory file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_theory(ss.str(), path);
}

// ---------------------------------------------------------------------------
// Compilation

std::string CompiledEquiv::label() const {
  std::string s = "eq" + std::to_string(source + 1);
  if (!aux.empty()) s += "/" + aux;
  return s;
}

const RelationDecl* CompiledTheory::relation(const std::string& pred, std::size_t arity) const {
  auto it = relations.find(pred_key(pred, arity));
  return it == relations.end() ? nullptr : &it->second;
}

std::optional<RelationClass> CompiledTheory::relation_class(const Formula& atom) const {
  if (!atom.is_atom()) return std::nullopt;
  const RelationDecl* r = relation(atom.pred(), atom.arity());
  if (!r) return std::nullopt;
  return r->cls;
}

bool CompiledTheory::is_database(const Formula& atom) const {
  return relation_class(atom) == RelationClass::Database;
}
bool CompiledTheory::is_arithmetic(const Formula& atom) const {
  return relation_class(atom) == RelationClass::Arithmetic;
}
bool CompiledTheory::is_executable(const Formula& atom) const {
  return relation_class(atom) == RelationClass::Executable;
}
bool CompiledTheory::is_declared(const Formula& atom) const { return relation_class(atom).has_value(); }

const std::vector<int>& CompiledTheory::clauses_for(const std::string& key) const {
  static const std::vector<int> none;
  auto it = clause_index.find(key);
  return it == clause_index.end() ? none : it->second;
}

std::vector<const FunctionDecl*> CompiledTheory::functions_for(const std::string& key) const {
  std::vector<const FunctionDecl*> out;
  for (const FunctionDecl& f : functions)
    if (f.templ.key() == key) out.push_back(&f);
  return out;
}

std::size_t CompiledTheory::count_clauses(ClauseOrigin origin, int rule) const {
  std::size_t n = 0;
  for (const HornClause& c : clauses)
    if (c.origin == origin && c.rule == rule) ++n;
  return n;
}

namespace {

void check_aux(const Formula& f, const Location& loc) {
  for (const std::string& p : predicates(f))
    if (p.rfind("aux_", 0) == 0) throw AuxNameCollision(loc.str() + ": predicate " + p + " uses the reserved aux_ prefix");
}

// Flattens an existentially quantified conjunction, renaming bound
// variables that clash with `taken`.
void flatten_ec(const Formula& f, std::set<std::string>& taken, std::vector<std::string>& vars,
                std::vector<Formula>& out, Session& session, const Location& loc) {
  if (f.is_true()) return;
  if (f.is_and()) {
    flatten_ec(f.left(), taken, vars, out, session, loc);
    flatten_ec(f.right(), taken, vars, out, session, loc);
    return;
  }
  if (f.is_exists()) {
    Substitution ren;
    for (const std::string& v : f.vars()) {
      if (taken.count(v)) {
        std::string nv = session.fresh_var(v);
        ren.set_raw(v, Term::var(nv));
        vars.push_back(nv);
        taken.insert(nv);
      } else {
        vars.push_back(v);
        taken.insert(v);
      }
    }
    flatten_ec(ren.empty() ? f.body() : apply(ren, f.body()), taken, vars, out, session, loc);
    return;
  }
  if (f.is_atom() || f.is_eq()) {
    out.push_back(f);
    return;
  }
  throw UnsupportedShape(loc.str() + ": right-hand side must be an existentially quantified conjunction");
}

std::vector<std::string> vars_of(const std::vector<Formula>& fs) {
  std::vector<std::string> out;
  for (const Formula& f : fs)
    for (const Term& t : f.args()) collect_vars(t, out);
  return out;
}

void append_vars(std::vector<std::string>& out, const std::vector<std::string>& more) {
  for (const auto& v : more)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

std::vector<Term> var_terms(const std::vector<std::string>& vs) {
  std::vector<Term> out;
  for (const auto& v : vs) out.push_back(Term::var(v));
  return out;
}

bool contains(const std::vector<std::string>& vs, const std::string& v) {
  return std::find(vs.begin(), vs.end(), v) != vs.end();
}

CompiledEquiv make_equiv(int source, std::vector<std::string> lhs_vars, std::vector<Formula> lhs, const Formula& rhs,
                         const Formula& conds, Session& session, const Location& loc) {
  CompiledEquiv ce;
  ce.source = source;
  ce.lhs_vars = std::move(lhs_vars);
  ce.lhs = std::move(lhs);
  ce.conds = conds;
  std::set<std::string> taken;
  for (const auto& v : vars_of(ce.lhs)) taken.insert(v);
  for (const auto& v : free_variables(conds)) taken.insert(v);
  flatten_ec(rhs, taken, ce.rhs_vars, ce.rhs_conjuncts, session, loc);
  ce.rhs = Formula::exists(ce.rhs_vars, Formula::conj(ce.rhs_conjuncts));
  return ce;
}

}  // namespace

CompiledTheory compile(const Theory& theory, Session& session) {
  CompiledTheory ct;

  for (const RelationDecl& r : theory.relations) {
    if (r.name.rfind("aux_", 0) == 0) throw AuxNameCollision(r.loc.str() + ": relation " + r.name + " uses the reserved aux_ prefix");
    ct.relations[pred_key(r.name, r.arity)] = r;
  }
  // Comparison operators are arithmetic relations without declaration.
  for (const char* op : {"<", ">", "=<", ">=", "\\="}) {
    RelationDecl d;
    d.name = op;
    d.arity = 2;
    d.cls = RelationClass::Arithmetic;
    ct.relations.emplace(pred_key(op, 2), d);
  }
  for (const EquivRule& e : theory.equivs) {
    check_aux(Formula::conj(e.lhs), e.loc);
    check_aux(e.rhs, e.loc);
    check_aux(e.conds, e.loc);
  }
  for (const HornClause& c : theory.clauses) {
    check_aux(c.head, c.loc);
    check_aux(Formula::conj(c.body), c.loc);
  }
  for (const NegRule& n : theory.negs) {
    check_aux(n.goal, n.loc);
    check_aux(n.body, n.loc);
  }
  for (const AssumableDecl& a : theory.assumables) check_aux(a.goal, a.loc);

  // Split existential left-hand sides over a fresh auxiliary predicate.
  struct Pending {
    CompiledEquiv ce;
    int ordinal;
    int sub;
  };
  std::vector<Pending> pending;
  int aux_counter = 0;
  for (std::size_t i = 0; i < theory.equivs.size(); ++i) {
    const EquivRule& e = theory.equivs[i];
    const int src = static_cast<int>(i);
    if (e.lhs_vars.empty() || e.lhs.size() == 1) {
      pending.push_back({make_equiv(src, e.lhs_vars, e.lhs, e.rhs, e.conds, session, e.loc), e.ordinal, 0});
      continue;
    }
    std::string aux = "aux_" + e.lhs[0].pred() + "_" + std::to_string(++aux_counter);
    std::vector<std::string> args = e.lhs_vars;
    append_vars(args, vars_of(e.lhs));
    Formula aux_atom = Formula::atom(aux, var_terms(args));
    ct.aux_preds.insert(aux_atom.key());
    // Conditions mentioning the existential variables stay with the definition.
    bool conds_local = false;
    for (const auto& v : free_variables(e.conds))
      if (contains(e.lhs_vars, v)) conds_local = true;
    CompiledEquiv def = make_equiv(src, {}, e.lhs, aux_atom, conds_local ? e.conds : Formula::truth(), session, e.loc);
    def.aux = aux;
    CompiledEquiv use =
        make_equiv(src, e.lhs_vars, {aux_atom}, e.rhs, conds_local ? Formula::truth() : e.conds, session, e.loc);
    use.aux = aux;
    pending.push_back({std::move(def), e.ordinal, 0});
    pending.push_back({std::move(use), e.ordinal, 1});
  }
  for (std::size_t i = 0; i < pending.size(); ++i) {
    pending[i].ce.id = static_cast<int>(i);
    ct.equivs.push_back(pending[i].ce);
  }
  for (const CompiledEquiv& ce : ct.equivs)
    for (std::size_t k = 0; k < ce.lhs.size(); ++k) ct.equiv_index[ce.lhs[k].key()].emplace_back(ce.id, static_cast<int>(k));

  // Horn-clause readings.
  struct Ordered {
    HornClause c;
    int ordinal;
    int sub;
  };
  std::vector<Ordered> all;
  for (const HornClause& c : theory.clauses) all.push_back({c, c.ordinal, 0});
  for (const NegRule& n : theory.negs) {
    HornClause c;
    c.head = Formula::atom("neg", {formula_to_term(n.goal)});
    c.body = conjuncts(n.body);
    c.loc = n.loc;
    c.ordinal = n.ordinal;
    all.push_back({c, n.ordinal, 0});
  }
  for (std::size_t pi = 0; pi < pending.size(); ++pi) {
    const CompiledEquiv& ce = ct.equivs[pi];
    const Location& loc = theory.equivs[ce.source].loc;
    const int ordinal = pending[pi].ordinal;
    const int sub_base = pending[pi].sub * 1000;
    std::vector<Formula> cond_list = conjuncts(ce.conds);

    // Normal readings: each LHS conjunct from the RHS and the conditions.
    std::vector<Formula> nbody = ce.rhs_conjuncts;
    nbody.insert(nbody.end(), cond_list.begin(), cond_list.end());
    Substitution lhs_sk;
    if (!ce.lhs_vars.empty()) {
      std::vector<std::string> bvars = vars_of(nbody);
      std::vector<Term> bargs = var_terms(bvars);
      for (const auto& v : ce.lhs_vars) lhs_sk.set_raw(v, session.fresh_skolem(bargs));
    }
    for (std::size_t k = 0; k < ce.lhs.size(); ++k) {
      HornClause c;
      c.head = lhs_sk.empty() ? ce.lhs[k] : apply(lhs_sk, ce.lhs[k]);
      c.body = nbody;
      c.origin = ClauseOrigin::Normal;
      c.rule = ce.id;
      c.loc = loc;
      c.ordinal = ordinal;
      all.push_back({c, ordinal, sub_base + 1 + static_cast<int>(k)});
    }

    // Backward readings: each RHS atom from the LHS and the conditions.
    std::vector<std::string> uvars = vars_of(ce.lhs);
    std::vector<Term> uargs = var_terms(uvars);
    Substitution rhs_sk;
    for (const auto& v : ce.rhs_vars) rhs_sk.set_raw(v, session.fresh_skolem(uargs));
    std::vector<Formula> bbody = ce.lhs;
    bbody.insert(bbody.end(), cond_list.begin(), cond_list.end());
    for (std::size_t j = 0; j < ce.rhs_conjuncts.size(); ++j) {
      const Formula& q = ce.rhs_conjuncts[j];
      if (!q.is_atom()) continue;
      HornClause c;
      c.head = rhs_sk.empty() ? q : apply(rhs_sk, q);
      c.body = bbody;
      c.origin = ClauseOrigin::Backward;
      c.rule = ce.id;
      c.loc = loc;
      c.ordinal = ordinal;
      all.push_back({c, ordinal, sub_base + 500 + static_cast<int>(j)});
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const Ordered& a, const Ordered& b) {
    return a.ordinal != b.ordinal ? a.ordinal < b.ordinal : a.sub < b.sub;
  });
  for (Ordered& o : all) {
    int id = static_cast<int>(ct.clauses.size());
    ct.clause_index[o.c.head.key()].push_back(id);
    ct.clauses.push_back(std::move(o.c));
  }

  // Function declarations as conditional equivalences over a second instance.
  ct.functions = theory.functions;
  for (const FunctionDecl& f : theory.functions) {
    Substitution prime;
    for (const auto& v : f.to) prime.set_raw(v, Term::var(v + "_1"));
    Formula other = apply(prime, f.templ);
    std::vector<Formula> eqs;
    for (const auto& v : f.to) eqs.push_back(Formula::eq(Term::var(v), Term::var(v + "_1")));
    CompiledEquiv ce;
    ce.id = static_cast<int>(ct.function_rules.size());
    ce.source = -1;
    ce.lhs = {f.templ};
    ce.rhs = Formula::conj(eqs);
    ce.rhs_conjuncts = eqs;
    ce.conds = other;
    ct.function_rules.push_back(std::move(ce));
  }

  ct.assumables = theory.assumables;
  for (std::size_t i = 0; i < ct.assumables.size(); ++i) {
    const Formula& g = ct.assumables[i].goal;
    ct.assumable_index[g.is_eq() ? std::string("=/2") : g.key()].push_back(static_cast<int>(i));
  }
  ct.negs = theory.negs;
  ct.call_patterns = theory.call_patterns;
  for (std::size_t i = 0; i < ct.call_patterns.size(); ++i)
    ct.call_pattern_index[ct.call_patterns[i].templ.key()].push_back(static_cast<int>(i));
  ct.quick_tests = theory.quick_tests;
  for (std::size_t i = 0; i < ct.quick_tests.size(); ++i)
    ct.quick_test_index[ct.quick_tests[i].goal.key()].push_back(static_cast<int>(i));
  return ct;
}

}  // namespace aet
