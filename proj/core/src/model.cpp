// Least Horn model over a finite active domain, used by check_equivalence.

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "aet/errors.hpp"
#include "aet/subst.hpp"
#include "aet/translator.hpp"

namespace aet {

namespace {

constexpr int kMaxDepth = 3;
constexpr std::size_t kMaxFacts = 200000;

int depth(const Term& t) {
  int d = 0;
  for (const auto& a : t.args()) d = std::max(d, depth(a));
  return t.args().empty() ? 0 : d + 1;
}

void ground_subterms(const Term& t, std::set<Term>& out) {
  if (t.ground()) out.insert(t);
  if (t.is_compound() && !t.is_list())
    for (const auto& a : t.args()) ground_subterms(a, out);
}

void formula_terms(const Formula& f, std::set<Term>& out) {
  std::vector<Formula> atoms;
  collect_atoms(f, atoms);
  for (const auto& a : atoms)
    for (const auto& t : a.args()) ground_subterms(t, out);
  std::function<void(const Formula&)> eqs = [&](const Formula& g) {
    switch (g.kind()) {
      case FormulaKind::Equality:
        for (const auto& t : g.args()) ground_subterms(t, out);
        return;
      case FormulaKind::And:
      case FormulaKind::Impl:
        eqs(g.left());
        eqs(g.right());
        return;
      case FormulaKind::Exists:
      case FormulaKind::Forall:
        eqs(g.body());
        return;
      default:
        return;
    }
  };
  eqs(f);
}

class Model {
 public:
  Model(const CompiledTheory& th, std::set<Term> domain) : th_(th), domain_(std::move(domain)) {}

  void add_fact(const std::string& key, const std::vector<Term>& args) {
    for (const auto& t : args)
      if (depth(t) > kMaxDepth) return;
    if (facts_[key].insert(args).second) {
      ++count_;
      for (const auto& t : args)
        if (!domain_.count(t) && active_.insert(t).second) stale_ = true;
      if (count_ > kMaxFacts) throw Error("model too large for the equivalence oracle");
    }
  }

  void saturate() {
    std::vector<const HornClause*> rules;
    for (const auto& c : th_.clauses)
      if (c.origin == ClauseOrigin::User || c.origin == ClauseOrigin::Normal) rules.push_back(&c);
    for (int round = 0; round < 1000; ++round) {
      std::size_t before = count_;
      for (const auto* c : rules) fire(*c);
      if (count_ == before) return;
    }
    throw Error("equivalence oracle did not reach a fixpoint");
  }

  bool holds(const Formula& f, std::map<std::string, Term>& val) const {
    switch (f.kind()) {
      case FormulaKind::True:
        return true;
      case FormulaKind::False:
      case FormulaKind::Mismatch:
        return false;
      case FormulaKind::Equality:
        return subst(f.lhs(), val) == subst(f.rhs(), val);
      case FormulaKind::Atom: {
        std::vector<Term> args;
        for (const auto& a : f.args()) args.push_back(subst(a, val));
        return atom_true(Formula::atom(f.pred(), args));
      }
      case FormulaKind::And:
        return holds(f.left(), val) && holds(f.right(), val);
      case FormulaKind::Impl:
        return !holds(f.ante(), val) || holds(f.cons(), val);
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        bool ex = f.is_exists();
        bool result = !ex;
        enumerate(f.vars(), 0, val, [&]() {
          bool h = holds(f.body(), val);
          if (ex && h) result = true;
          if (!ex && !h) result = false;
          return ex ? !result : result;
        });
        return result;
      }
    }
    return false;
  }

  // Calls fn for each assignment of vars over the active domain until fn
  // returns false. Restores previous bindings afterwards.
  bool enumerate(const std::vector<std::string>& vars, std::size_t i, std::map<std::string, Term>& val,
                 const std::function<bool()>& fn) const {
    if (i == vars.size()) return fn();
    std::optional<Term> saved;
    if (auto it = val.find(vars[i]); it != val.end()) saved = it->second;
    bool go = true;
    for (const auto& t : universe()) {
      val[vars[i]] = t;
      if (!enumerate(vars, i + 1, val, fn)) {
        go = false;
        break;
      }
    }
    if (saved)
      val[vars[i]] = *saved;
    else
      val.erase(vars[i]);
    return go;
  }

  const std::set<Term>& universe() const {
    // Rebuilt only between enumerations: callers iterate over the result.
    if (stale_) {
      all_ = domain_;
      all_.insert(active_.begin(), active_.end());
      stale_ = false;
    }
    return all_;
  }

  const std::set<Term>& domain() const { return domain_; }

 private:
  static Term subst(const Term& t, const std::map<std::string, Term>& val) {
    if (t.ground()) return t;
    Substitution s;
    for (const auto& [k, v] : val) s.set_raw(k, v);
    return apply(s, t);
  }

  bool atom_true(const Formula& a) const {
    if (is_builtin(a.pred(), a.arity())) {
      auto o = eval_builtin(a);
      if (o.kind != BuiltinOutcome::Unknown) return o.kind == BuiltinOutcome::Succeed;
    }
    auto it = facts_.find(a.key());
    return it != facts_.end() && it->second.count(a.args());
  }

  void fire(const HornClause& c) {
    std::vector<Formula> body;
    std::vector<Formula> late;
    for (const auto& b : c.body)
      (b.is_atom() && is_builtin(b.pred(), b.arity()) ? late : body).push_back(b);
    body.insert(body.end(), late.begin(), late.end());
    std::vector<std::pair<std::string, std::vector<Term>>> derived;
    join(body, 0, Substitution{}, [&](const Substitution& s) {
      Formula h = apply(s, c.head);
      std::vector<std::string> free = term_vars(h.args());
      std::map<std::string, Term> val;
      enumerate_domain(free, 0, val, [&]() {
        Substitution g;
        for (const auto& [k, v] : val) g.set_raw(k, v);
        derived.push_back(std::make_pair(h.key(), aet::apply(g, h.args())));
      });
    });
    for (auto& [k, args] : derived) add_fact(k, args);
  }

  void enumerate_domain(const std::vector<std::string>& vars, std::size_t i, std::map<std::string, Term>& val,
                        const std::function<void()>& fn) const {
    if (i == vars.size()) {
      fn();
      return;
    }
    for (const auto& t : universe()) {
      val[vars[i]] = t;
      enumerate_domain(vars, i + 1, val, fn);
    }
    val.erase(vars[i]);
  }

  void join(const std::vector<Formula>& body, std::size_t i, const Substitution& s,
            const std::function<void(const Substitution&)>& emit) const {
    if (i == body.size()) {
      emit(s);
      return;
    }
    Formula g = apply(s, body[i]);
    if (g.is_eq()) {
      Substitution t = s;
      if (unify(g.lhs(), g.rhs(), t)) join(body, i + 1, t, emit);
      return;
    }
    if (!g.is_atom()) return;
    if (is_builtin(g.pred(), g.arity())) {
      auto o = eval_builtin(g);
      if (o.kind == BuiltinOutcome::Fail) return;
      if (o.kind == BuiltinOutcome::Succeed) {
        Substitution t = s;
        for (const auto& [v, x] : o.binding.map())
          if (!t.bind(v, x)) return;
        join(body, i + 1, t, emit);
        return;
      }
      // Unknown: ground the remaining variables over the domain.
      std::vector<std::string> free = term_vars(g.args());
      if (free.empty()) return;
      std::map<std::string, Term> val;
      enumerate_domain(free, 0, val, [&]() {
        Substitution t = s;
        for (const auto& [k, v] : val) t.bind(k, v);
        auto o2 = eval_builtin(apply(t, g));
        if (o2.kind == BuiltinOutcome::Succeed) join(body, i + 1, t, emit);
      });
      return;
    }
    auto it = facts_.find(g.key());
    if (it == facts_.end()) return;
    // Copy: facts may grow while joining is in progress elsewhere.
    std::vector<std::vector<Term>> rows(it->second.begin(), it->second.end());
    for (const auto& row : rows) {
      Substitution t = s;
      if (unify_args(g.args(), row, t)) join(body, i + 1, t, emit);
    }
  }

  const CompiledTheory& th_;
  std::set<Term> domain_;
  std::set<Term> active_;
  mutable std::set<Term> all_;
  mutable bool stale_ = true;
  std::map<std::string, std::set<std::vector<Term>>> facts_;
  std::size_t count_ = 0;
};

std::string show(const std::map<std::string, Term>& val) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [k, v] : val) {
    os << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  os << "}";
  return os.str();
}

}  // namespace

namespace {

constexpr std::size_t kMaxOpenAtoms = 12;

// Ground atoms over predicates that no clause, store relation or declaration
// constrains; their truth is enumerated rather than assumed false.
std::vector<Formula> open_atoms(const Formula& source, const Formula& target, const CompiledTheory& theory,
                                const RelStore& store, const std::set<Term>& universe) {
  std::vector<Formula> atoms;
  collect_atoms(source, atoms);
  collect_atoms(target, atoms);
  for (const auto& c : theory.clauses)
    for (const auto& b : c.body)
      if (b.is_atom()) atoms.push_back(b);
  std::map<std::string, std::size_t> open;
  for (const auto& a : atoms) {
    if (theory.is_declared(a) || is_builtin(a.pred(), a.arity()) || store.decl(a.pred())) continue;
    if (!theory.clauses_for(a.key()).empty()) continue;
    open[a.pred()] = a.arity();
  }
  std::set<Term> base = universe;
  formula_terms(source, base);
  formula_terms(target, base);
  std::vector<Term> dom(base.begin(), base.end());
  std::vector<Formula> out;
  for (const auto& [pred, n] : open) {
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      std::vector<Term> args;
      for (auto i : idx) args.push_back(dom[i]);
      out.push_back(Formula::atom(pred, args));
      if (out.size() > kMaxOpenAtoms) return {};
      std::size_t k = 0;
      while (k < n && ++idx[k] == dom.size()) idx[k++] = 0;
      if (k == n) break;
    }
  }
  return out;
}

}  // namespace

EquivalenceVerdict check_equivalence(const Formula& source, const Formula& target,
                                     const std::vector<AssumptionInstance>& assumptions, const CompiledTheory& theory,
                                     const RelStore& store, const std::set<Term>& universe) {
  if (universe.size() > 6)
    throw UniverseTooLarge("universe has " + std::to_string(universe.size()) + " constants; at most 6 allowed");
  std::set<Term> domain = universe;
  formula_terms(source, domain);
  formula_terms(target, domain);
  for (const auto& a : assumptions) formula_terms(a.goal, domain);
  for (const auto& c : theory.clauses) {
    formula_terms(c.head, domain);
    for (const auto& b : c.body) formula_terms(b, domain);
  }
  std::vector<Formula> open = open_atoms(source, target, theory, store, universe);
  std::vector<std::string> free = free_variables_ordered(source);
  for (const auto& v : free_variables_ordered(target))
    if (std::find(free.begin(), free.end(), v) == free.end()) free.push_back(v);
  EquivalenceVerdict verdict;
  for (std::size_t mask = 0; mask < (std::size_t{1} << open.size()) && verdict.equal; ++mask) {
  Model m(theory, domain);
  std::string interp;
  for (std::size_t i = 0; i < open.size(); ++i)
    if (mask & (std::size_t{1} << i)) {
      m.add_fact(open[i].key(), open[i].args());
      interp += " " + to_string(open[i]);
    }
  for (const auto& rel : store.relations())
    for (const auto& row : store.tuples(rel)) m.add_fact(pred_key(rel, row.size()), row);
  for (const auto& a : assumptions) {
    if (!a.goal.is_atom()) throw UnsupportedGoalShape("oracle takes atomic assumptions only: " + to_string(a.goal));
    std::vector<std::string> vs = term_vars(a.goal.args());
    std::map<std::string, Term> val;
    Formula g = a.goal;
    m.enumerate(vs, 0, val, [&]() {
      Substitution s;
      for (const auto& [k, v] : val) s.set_raw(k, v);
      Formula inst = apply(s, g);
      m.add_fact(inst.key(), inst.args());
      return true;
    });
  }
  m.saturate();

  std::map<std::string, Term> val;
  m.enumerate(free, 0, val, [&]() {
    bool a = m.holds(source, val);
    bool b = m.holds(target, val);
    if (a != b) {
      verdict.equal = false;
      verdict.witness = show(val) + " source " + (a ? "true" : "false") + ", target " + (b ? "true" : "false");
      if (!interp.empty()) verdict.witness += "; true open atoms:" + interp;
      return false;
    }
    return true;
  });
  }
  return verdict;
}

}  // namespace aet
