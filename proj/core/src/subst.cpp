#include "aet/subst.hpp"

#include <algorithm>
#include <sstream>

#include "aet/errors.hpp"
#include "aet/session.hpp"

namespace aet {

const Term* Substitution::find(const std::string& var) const {
  auto it = m_.find(var);
  return it == m_.end() ? nullptr : &it->second;
}

namespace {

Term apply_map(const std::map<std::string, Term>& m, const Term& t) {
  if (t.ground() || m.empty()) return t;
  if (t.is_var()) {
    auto it = m.find(t.name());
    return it == m.end() ? t : it->second;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  bool changed = false;
  for (const Term& a : t.args()) {
    args.push_back(apply_map(m, a));
    if (!(args.back() == a)) changed = true;
  }
  if (!changed) return t;
  switch (t.kind()) {
    case TermKind::Compound:
      return Term::compound(t.name(), std::move(args));
    case TermKind::Skolem:
      return Term::skolem(t.index(), std::move(args));
    case TermKind::Named:
      return Term::named(t.name(), args[0]);
    default:
      return t;
  }
}

Term apply_one(const std::string& var, const Term& val, const Term& t) {
  if (t.ground()) return t;
  if (t.is_var()) return t.name() == var ? val : t;
  if (!occurs(var, t)) return t;
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(apply_one(var, val, a));
  switch (t.kind()) {
    case TermKind::Compound:
      return Term::compound(t.name(), std::move(args));
    case TermKind::Skolem:
      return Term::skolem(t.index(), std::move(args));
    case TermKind::Named:
      return Term::named(t.name(), args[0]);
    default:
      return t;
  }
}

}  // namespace

bool Substitution::bind(const std::string& var, const Term& t) {
  if (t.is_var() && t.name() == var) return true;
  if (occurs(var, t)) return false;
  for (auto& [k, v] : m_) v = apply_one(var, t, v);
  m_[var] = t;
  return true;
}

Substitution Substitution::restrict(const std::vector<std::string>& vars) const {
  Substitution out;
  for (const auto& v : vars)
    if (auto* t = find(v)) out.m_[v] = *t;
  return out;
}

Substitution Substitution::without(const std::vector<std::string>& vars) const {
  Substitution out = *this;
  for (const auto& v : vars) out.m_.erase(v);
  return out;
}

std::ostream& operator<<(std::ostream& os, const Substitution& s) {
  os << '{';
  bool first = true;
  for (const auto& [k, v] : s.map()) {
    os << (first ? "" : ", ") << k << "->" << v;
    first = false;
  }
  return os << '}';
}

Term apply(const Substitution& s, const Term& t) { return apply_map(s.map(), t); }

std::vector<Term> apply(const Substitution& s, const std::vector<Term>& ts) {
  std::vector<Term> out;
  out.reserve(ts.size());
  for (const Term& t : ts) out.push_back(apply(s, t));
  return out;
}

Formula apply(const Substitution& s, const Formula& f) {
  if (s.empty()) return f;
  switch (f.kind()) {
    case FormulaKind::Atom:
      return Formula::atom(f.pred(), apply(s, f.args()));
    case FormulaKind::Equality:
      return Formula::eq(apply(s, f.lhs()), apply(s, f.rhs()));
    case FormulaKind::Mismatch:
      return Formula::mismatch(apply(s, f.lhs()), apply(s, f.rhs()));
    case FormulaKind::And:
      return Formula::conj(apply(s, f.left()), apply(s, f.right()));
    case FormulaKind::Impl:
      return Formula::impl(apply(s, f.ante()), apply(s, f.cons()));
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      Substitution inner = s.without(f.vars());
      std::set<std::string> body_free = free_variables(f.body());
      std::set<std::string> range_vars;
      for (const auto& [k, v] : inner.map()) {
        if (!body_free.count(k)) continue;
        std::vector<std::string> vs;
        collect_vars(v, vs);
        range_vars.insert(vs.begin(), vs.end());
      }
      std::vector<std::string> vars;
      for (const auto& v : f.vars()) {
        if (!range_vars.count(v)) {
          vars.push_back(v);
          continue;
        }
        std::string nv = v + "'";
        auto clash = [&](const std::string& n) {
          return range_vars.count(n) || body_free.count(n) || inner.contains(n) ||
                 std::find(f.vars().begin(), f.vars().end(), n) != f.vars().end() ||
                 std::find(vars.begin(), vars.end(), n) != vars.end();
        };
        while (clash(nv)) nv += "'";
        inner.set_raw(v, Term::var(nv));
        vars.push_back(nv);
      }
      Formula body = apply(inner, f.body());
      return f.is_exists() ? Formula::exists(vars, body) : Formula::forall(vars, body);
    }
    default:
      return f;
  }
}

Substitution compose(const Substitution& s1, const Substitution& s2) {
  Substitution out;
  for (const auto& [k, v] : s1.map()) {
    Term t = apply(s2, v);
    if (!(t.is_var() && t.name() == k)) out.set_raw(k, t);
  }
  for (const auto& [k, v] : s2.map())
    if (!s1.contains(k)) out.set_raw(k, v);
  return out;
}

namespace {

bool same_head(const Term& a, const Term& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Constant:
      return a.name() == b.name();
    case TermKind::Number:
      return a.value() == b.value();
    case TermKind::Date:
      return a.date_key() == b.date_key();
    case TermKind::Discharge:
      return a.index() == b.index();
    case TermKind::Compound:
      return a.name() == b.name() && a.args().size() == b.args().size();
    case TermKind::Skolem:
      return a.index() == b.index() && a.args().size() == b.args().size();
    case TermKind::Named:
      return a.name() == b.name();
    default:
      return false;
  }
}

bool unify_rec(const Term& a0, const Term& b0, Substitution& s) {
  Term a = a0, b = b0;
  if (a.is_var())
    if (const Term* v = s.find(a.name())) a = *v;
  if (b.is_var())
    if (const Term* v = s.find(b.name())) b = *v;
  if (a.is_var() && b.is_var() && a.name() == b.name()) return true;
  if (a.is_var()) return s.bind(a.name(), apply(s, b));
  if (b.is_var()) return s.bind(b.name(), apply(s, a));
  if (!same_head(a, b)) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!unify_rec(a.args()[i], b.args()[i], s)) return false;
  return true;
}

bool match_rec(const Term& p, const Term& t, Substitution& s) {
  if (p.is_var()) {
    if (const Term* v = s.find(p.name())) return *v == t;
    s.set_raw(p.name(), t);
    return true;
  }
  if (!same_head(p, t)) return false;
  for (std::size_t i = 0; i < p.args().size(); ++i)
    if (!match_rec(p.args()[i], t.args()[i], s)) return false;
  return true;
}

bool comparable(const Formula& a, const Formula& b) {
  if (a.kind() != b.kind()) return false;
  if (a.is_atom()) return a.pred() == b.pred() && a.arity() == b.arity();
  return a.is_eq() || a.is_mismatch();
}

}  // namespace

bool unify(const Term& a, const Term& b, Substitution& s) {
  Substitution tmp = s;
  if (!unify_rec(a, b, tmp)) return false;
  s = std::move(tmp);
  return true;
}

std::optional<Substitution> unify(const Term& a, const Term& b) {
  Substitution s;
  if (!unify_rec(a, b, s)) return std::nullopt;
  return s;
}

bool unify_args(const std::vector<Term>& a, const std::vector<Term>& b, Substitution& s) {
  if (a.size() != b.size()) return false;
  Substitution tmp = s;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!unify_rec(a[i], b[i], tmp)) return false;
  s = std::move(tmp);
  return true;
}

bool unify(const Formula& a, const Formula& b, Substitution& s) {
  if (!comparable(a, b)) return false;
  return unify_args(a.args(), b.args(), s);
}

std::optional<Substitution> unify(const Formula& a, const Formula& b) {
  Substitution s;
  if (!unify(a, b, s)) return std::nullopt;
  return s;
}

bool match(const Term& pattern, const Term& t, Substitution& s) {
  Substitution tmp = s;
  if (!match_rec(pattern, t, tmp)) return false;
  s = std::move(tmp);
  return true;
}

bool match(const Formula& pattern, const Formula& f, Substitution& s) {
  if (!comparable(pattern, f)) return false;
  Substitution tmp = s;
  for (std::size_t i = 0; i < pattern.args().size(); ++i)
    if (!match_rec(pattern.args()[i], f.args()[i], tmp)) return false;
  s = std::move(tmp);
  return true;
}

namespace {

Formula rename_all(const Formula& f, const std::map<std::string, std::string>& m);

Term rename_term(const Term& t, const std::map<std::string, std::string>& m) {
  std::map<std::string, Term> tm;
  std::vector<std::string> vs;
  collect_vars(t, vs);
  for (const auto& v : vs)
    if (auto it = m.find(v); it != m.end()) tm[v] = Term::var(it->second);
  return apply_map(tm, t);
}

Formula rename_all(const Formula& f, const std::map<std::string, std::string>& m) {
  auto rn = [&](const std::vector<Term>& ts) {
    std::vector<Term> out;
    for (const Term& t : ts) out.push_back(rename_term(t, m));
    return out;
  };
  auto rv = [&](const std::vector<std::string>& vs) {
    std::vector<std::string> out;
    for (const auto& v : vs) {
      auto it = m.find(v);
      out.push_back(it == m.end() ? v : it->second);
    }
    return out;
  };
  switch (f.kind()) {
    case FormulaKind::Atom:
      return Formula::atom(f.pred(), rn(f.args()));
    case FormulaKind::Equality: {
      auto a = rn(f.args());
      return Formula::eq(a[0], a[1]);
    }
    case FormulaKind::Mismatch: {
      auto a = rn(f.args());
      return Formula::mismatch(a[0], a[1]);
    }
    case FormulaKind::And:
      return Formula::conj(rename_all(f.left(), m), rename_all(f.right(), m));
    case FormulaKind::Impl:
      return Formula::impl(rename_all(f.ante(), m), rename_all(f.cons(), m));
    case FormulaKind::Exists:
      return Formula::exists(rv(f.vars()), rename_all(f.body(), m));
    case FormulaKind::Forall:
      return Formula::forall(rv(f.vars()), rename_all(f.body(), m));
    default:
      return f;
  }
}

}  // namespace

bool subsumes(const Formula& general, const Formula& specific) {
  std::set<std::string> taken = all_variables(specific);
  std::map<std::string, std::string> m;
  int k = 0;
  for (const auto& v : all_variables(general)) {
    std::string n;
    do n = "_S" + std::to_string(++k);
    while (taken.count(n));
    m[v] = n;
  }
  Substitution s;
  return match(rename_all(general, m), specific, s);
}

bool variant(const Formula& a, const Formula& b) { return subsumes(a, b) && subsumes(b, a); }

Formula rename_apart(const Formula& f, Session& session, Substitution* renaming) {
  std::map<std::string, std::string> m;
  for (const auto& v : all_variables(f)) m[v] = session.fresh_var(v);
  if (renaming)
    for (const auto& [k, v] : m) renaming->set_raw(k, Term::var(v));
  return rename_all(f, m);
}

namespace {

void skolemize_rec(const Formula& f, Substitution& sub, const std::vector<Term>& univ, Session& session,
                   std::vector<Formula>& out) {
  switch (f.kind()) {
    case FormulaKind::Atom:
    case FormulaKind::Equality:
      out.push_back(apply(sub, f));
      return;
    case FormulaKind::True:
      return;
    case FormulaKind::And:
      skolemize_rec(f.left(), sub, univ, session, out);
      skolemize_rec(f.right(), sub, univ, session, out);
      return;
    case FormulaKind::Exists: {
      std::set<std::string> fv = free_variables(f.body());
      Substitution inner = sub;
      for (const auto& v : f.vars())
        if (fv.count(v)) inner.set_raw(v, session.fresh_skolem(univ));
      skolemize_rec(f.body(), inner, univ, session, out);
      return;
    }
    default: {
      std::ostringstream os;
      os << "cannot skolemize " << f;
      throw UnsupportedShape(os.str());
    }
  }
}

std::vector<Term> as_vars(const std::vector<std::string>& names) {
  std::vector<Term> out;
  for (const auto& n : names) out.push_back(Term::var(n));
  return out;
}

}  // namespace

std::vector<Formula> skolemize(const Formula& f, Session& session) {
  std::vector<Formula> out;
  Substitution sub;
  if (f.is_impl()) {
    std::vector<std::string> univ = free_variables_ordered(f.ante());
    for (const auto& v : free_variables_ordered(f.cons()))
      if (std::find(univ.begin(), univ.end(), v) == univ.end()) univ.push_back(v);
    std::vector<Formula> cons;
    skolemize_rec(f.cons(), sub, as_vars(univ), session, cons);
    out.push_back(Formula::impl(f.ante(), Formula::conj(cons)));
    return out;
  }
  skolemize_rec(f, sub, as_vars(free_variables_ordered(f)), session, out);
  return out;
}

namespace {

void skolem_consts(const Term& t, std::vector<int>& out) {
  if (t.is_skolem() && t.args().empty()) {
    if (std::find(out.begin(), out.end(), t.index()) == out.end()) out.push_back(t.index());
    return;
  }
  for (const Term& a : t.args()) skolem_consts(a, out);
}

Term replace_skolems(const Term& t, const std::map<int, std::string>& m) {
  if (t.is_skolem() && t.args().empty()) {
    auto it = m.find(t.index());
    return it == m.end() ? t : Term::var(it->second);
  }
  if (t.args().empty()) return t;
  std::vector<Term> args;
  for (const Term& a : t.args()) args.push_back(replace_skolems(a, m));
  switch (t.kind()) {
    case TermKind::Compound:
      return Term::compound(t.name(), std::move(args));
    case TermKind::Skolem:
      return Term::skolem(t.index(), std::move(args));
    case TermKind::Named:
      return Term::named(t.name(), args[0]);
    default:
      return t;
  }
}

}  // namespace

Formula deskolemize(const std::vector<Formula>& clauses) {
  std::vector<int> order;
  std::set<std::string> taken;
  for (const auto& c : clauses) {
    for (const Term& t : c.args()) skolem_consts(t, order);
    auto vs = all_variables(c);
    taken.insert(vs.begin(), vs.end());
  }
  std::map<int, std::string> m;
  std::vector<std::string> vars;
  int k = 0;
  for (int idx : order) {
    std::string n;
    do n = "X" + std::to_string(++k);
    while (taken.count(n));
    m[idx] = n;
    vars.push_back(n);
  }
  std::vector<Formula> body;
  for (const auto& c : clauses) {
    std::vector<Term> args;
    for (const Term& t : c.args()) args.push_back(replace_skolems(t, m));
    if (c.is_atom())
      body.push_back(Formula::atom(c.pred(), std::move(args)));
    else if (c.is_eq())
      body.push_back(Formula::eq(args[0], args[1]));
    else
      body.push_back(c);
  }
  return Formula::exists(vars, Formula::conj(body));
}

}  // namespace aet
