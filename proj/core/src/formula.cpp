#include "aet/formula.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "aet/syntax.hpp"

namespace aet {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Formula Formula::make(Node node) {
  std::size_t h = static_cast<std::size_t>(node.kind) * 2654435761u;
  h = mix(h, std::hash<std::string>{}(node.pred));
  for (const Term& t : node.args) h = mix(h, t.hash());
  for (const auto& v : node.vars) h = mix(h, std::hash<std::string>{}(v));
  if (!node.l.null()) h = mix(h, node.l.hash());
  if (!node.r.null()) h = mix(h, node.r.hash());
  node.hash = h;
  Formula f;
  f.n_ = std::make_shared<const Node>(std::move(node));
  return f;
}

Formula Formula::atom(std::string pred, std::vector<Term> args) {
  Node n{FormulaKind::Atom, std::move(pred), std::move(args)};
  return make(std::move(n));
}

Formula Formula::eq(Term l, Term r) {
  Node n{FormulaKind::Equality, {}, {std::move(l), std::move(r)}};
  return make(std::move(n));
}

Formula Formula::conj(Formula l, Formula r) {
  Node n{FormulaKind::And};
  n.l = std::move(l);
  n.r = std::move(r);
  return make(std::move(n));
}

Formula Formula::conj(const std::vector<Formula>& items) {
  if (items.empty()) return truth();
  Formula acc = items.back();
  for (std::size_t i = items.size() - 1; i-- > 0;) acc = conj(items[i], acc);
  return acc;
}

Formula Formula::exists(std::vector<std::string> vars, Formula body) {
  if (vars.empty()) return body;
  Node n{FormulaKind::Exists};
  n.vars = std::move(vars);
  n.l = std::move(body);
  return make(std::move(n));
}

Formula Formula::forall(std::vector<std::string> vars, Formula body) {
  if (vars.empty()) return body;
  Node n{FormulaKind::Forall};
  n.vars = std::move(vars);
  n.l = std::move(body);
  return make(std::move(n));
}

Formula Formula::impl(Formula ante, Formula cons) {
  Node n{FormulaKind::Impl};
  n.l = std::move(ante);
  n.r = std::move(cons);
  return make(std::move(n));
}

Formula Formula::truth() {
  static const Formula t = make(Node{FormulaKind::True});
  return t;
}

Formula Formula::falsity() {
  static const Formula f = make(Node{FormulaKind::False});
  return f;
}

Formula Formula::mismatch(Term l, Term r) {
  Node n{FormulaKind::Mismatch, {}, {std::move(l), std::move(r)}};
  return make(std::move(n));
}

std::string Formula::key() const { return pred() + "/" + std::to_string(arity()); }

int Formula::compare(const Formula& a, const Formula& b) {
  if (a.n_ == b.n_) return 0;
  if (a.null() || b.null()) return a.null() ? (b.null() ? 0 : -1) : 1;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  if (int c = a.pred().compare(b.pred()); c != 0) return c < 0 ? -1 : 1;
  if (a.args().size() != b.args().size()) return a.args().size() < b.args().size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (int c = Term::compare(a.args()[i], b.args()[i]); c != 0) return c;
  if (a.vars() != b.vars()) return a.vars() < b.vars() ? -1 : 1;
  if (int c = compare(a.left(), b.left()); c != 0) return c;
  return compare(a.right(), b.right());
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.n_ == b.n_) return true;
  if (a.null() || b.null()) return false;
  if (a.hash() != b.hash()) return false;
  return Formula::compare(a, b) == 0;
}

namespace {

void print_vars(std::ostream& os, const std::vector<std::string>& vs) {
  os << '[';
  for (std::size_t i = 0; i < vs.size(); ++i) os << (i ? "," : "") << vs[i];
  os << ']';
}

void print_atom(std::ostream& os, const Formula& f) {
  if (is_comparison(f.pred()) && f.arity() == 2) {
    os << f.args()[0] << f.pred() << f.args()[1];
    return;
  }
  os << functor_text(f.pred());
  if (f.arity() == 0) return;
  os << '(';
  for (std::size_t i = 0; i < f.arity(); ++i) os << (i ? "," : "") << f.args()[i];
  os << ')';
}

void print(std::ostream& os, const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Atom:
      print_atom(os, f);
      break;
    case FormulaKind::Equality:
      os << f.lhs() << '=' << f.rhs();
      break;
    case FormulaKind::And:
      os << "and(";
      print(os, f.left());
      os << ',';
      print(os, f.right());
      os << ')';
      break;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      os << (f.is_exists() ? "exists(" : "forall(");
      print_vars(os, f.vars());
      os << ',';
      print(os, f.body());
      os << ')';
      break;
    case FormulaKind::Impl:
      os << "impl(";
      print(os, f.ante());
      os << ',';
      print(os, f.cons());
      os << ')';
      break;
    case FormulaKind::True:
      os << "true";
      break;
    case FormulaKind::False:
      os << "false";
      break;
    case FormulaKind::Mismatch:
      os << "mismatch(" << f.lhs() << ',' << f.rhs() << ')';
      break;
  }
}

void pretty_print(std::ostream& os, const Formula& f, int indent) {
  std::string pad(indent, ' ');
  auto two = [&](const char* head, const Formula& a, const Formula& b) {
    os << pad << head << "(\n";
    pretty_print(os, a, indent + 2);
    os << ",\n";
    pretty_print(os, b, indent + 2);
    os << ')';
  };
  switch (f.kind()) {
    case FormulaKind::And:
      two("and", f.left(), f.right());
      break;
    case FormulaKind::Impl:
      two("impl", f.ante(), f.cons());
      break;
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      os << pad << (f.is_exists() ? "exists(" : "forall(");
      print_vars(os, f.vars());
      os << ",\n";
      pretty_print(os, f.body(), indent + 2);
      os << ')';
      break;
    default:
      os << pad;
      print(os, f);
  }
}

}  // namespace

std::ostream& operator<<(std::ostream& os, const Formula& f) {
  if (f.null()) return os << "<null>";
  print(os, f);
  return os;
}

std::string to_string(const Formula& f) {
  std::ostringstream os;
  os << f;
  return os.str();
}

std::string pretty(const Formula& f) {
  std::ostringstream os;
  pretty_print(os, f, 0);
  return os.str();
}

std::vector<Formula> conjuncts(const Formula& f) {
  std::vector<Formula> out;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    if (g.is_and()) {
      walk(g.left());
      walk(g.right());
    } else if (!g.is_true()) {
      out.push_back(g);
    }
  };
  walk(f);
  return out;
}

namespace {

void free_vars_rec(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out) {
  auto note_term = [&](const Term& t) {
    std::vector<std::string> vs;
    collect_vars(t, vs);
    for (const auto& v : vs) {
      bool is_bound = false;
      for (const auto& b : bound)
        if (b == v) is_bound = true;
      if (is_bound) continue;
      bool seen = false;
      for (const auto& o : out)
        if (o == v) seen = true;
      if (!seen) out.push_back(v);
    }
  };
  switch (f.kind()) {
    case FormulaKind::Atom:
    case FormulaKind::Equality:
    case FormulaKind::Mismatch:
      for (const Term& t : f.args()) note_term(t);
      break;
    case FormulaKind::And:
    case FormulaKind::Impl:
      free_vars_rec(f.left(), bound, out);
      free_vars_rec(f.right(), bound, out);
      break;
    case FormulaKind::Exists:
    case FormulaKind::Forall: {
      std::size_t n = bound.size();
      bound.insert(bound.end(), f.vars().begin(), f.vars().end());
      free_vars_rec(f.body(), bound, out);
      bound.resize(n);
      break;
    }
    default:
      break;
  }
}

}  // namespace

std::vector<std::string> free_variables_ordered(const Formula& f) {
  std::vector<std::string> bound, out;
  free_vars_rec(f, bound, out);
  return out;
}

std::set<std::string> free_variables(const Formula& f) {
  auto v = free_variables_ordered(f);
  return {v.begin(), v.end()};
}

std::set<std::string> all_variables(const Formula& f) {
  std::set<std::string> out;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    std::vector<std::string> vs;
    for (const Term& t : g.args()) collect_vars(t, vs);
    out.insert(vs.begin(), vs.end());
    out.insert(g.vars().begin(), g.vars().end());
    if (!g.left().null()) walk(g.left());
    if (!g.right().null()) walk(g.right());
  };
  walk(f);
  return out;
}

std::vector<std::string> term_vars(const std::vector<Term>& ts) {
  std::vector<std::string> out;
  for (const Term& t : ts) collect_vars(t, out);
  return out;
}

Term formula_to_term(const Formula& atom) {
  if (atom.is_eq()) return Term::compound("=", atom.args());
  return Term::compound(atom.pred(), atom.args());
}

Formula term_to_atom(const Term& t) {
  if (t.is_constant()) return Formula::atom(t.name());
  if (t.is_compound() && t.name() == "=" && t.args().size() == 2) return Formula::eq(t.args()[0], t.args()[1]);
  return Formula::atom(t.name(), t.args());
}

bool contains_discharge(const Formula& f) {
  for (const Term& t : f.args())
    if (contains_discharge(t)) return true;
  if (!f.left().null() && contains_discharge(f.left())) return true;
  if (!f.right().null() && contains_discharge(f.right())) return true;
  return false;
}

bool contains_skolem(const Formula& f) {
  for (const Term& t : f.args())
    if (contains_skolem(t)) return true;
  if (!f.left().null() && contains_skolem(f.left())) return true;
  if (!f.right().null() && contains_skolem(f.right())) return true;
  return false;
}

void collect_atoms(const Formula& f, std::vector<Formula>& out) {
  if (f.is_atom()) {
    out.push_back(f);
    return;
  }
  if (!f.left().null()) collect_atoms(f.left(), out);
  if (!f.right().null()) collect_atoms(f.right(), out);
}

std::set<std::string> predicates(const Formula& f) {
  std::vector<Formula> atoms;
  collect_atoms(f, atoms);
  std::set<std::string> out;
  for (const auto& a : atoms) out.insert(a.key());
  return out;
}

namespace {

Term rename_term(const Term& t, const std::map<std::string, std::string>& m) {
  if (t.ground()) return t;
  if (t.is_var()) {
    auto it = m.find(t.name());
    return it == m.end() ? t : Term::var(it->second);
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const Term& a : t.args()) args.push_back(rename_term(a, m));
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

// Renames binders by order of appearance; free variables either kept or
// renamed too.
struct Canon {
  bool rename_free;
  int counter = 0;
  std::map<std::string, std::string> free_map;

  std::string next() { return "V" + std::to_string(++counter); }

  void note_free(const Term& t, const std::map<std::string, std::string>& env) {
    if (!rename_free) return;
    std::vector<std::string> vs;
    collect_vars(t, vs);
    for (const auto& v : vs)
      if (!env.count(v) && !free_map.count(v)) free_map[v] = next();
  }

  Formula go(const Formula& f, std::map<std::string, std::string> env) {
    switch (f.kind()) {
      case FormulaKind::Atom:
      case FormulaKind::Equality:
      case FormulaKind::Mismatch: {
        std::vector<Term> args;
        for (const Term& t : f.args()) {
          note_free(t, env);
          std::map<std::string, std::string> m = free_map;
          for (const auto& [k, v] : env) m[k] = v;
          args.push_back(rename_term(t, m));
        }
        if (f.is_atom()) return Formula::atom(f.pred(), std::move(args));
        if (f.is_eq()) return Formula::eq(args[0], args[1]);
        return Formula::mismatch(args[0], args[1]);
      }
      case FormulaKind::And: {
        Formula l = go(f.left(), env);
        return Formula::conj(l, go(f.right(), env));
      }
      case FormulaKind::Impl: {
        Formula l = go(f.ante(), env);
        return Formula::impl(l, go(f.cons(), env));
      }
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        std::vector<std::string> vs;
        for (const auto& v : f.vars()) {
          std::string n = rename_free ? next() : "#" + std::to_string(++counter);
          env[v] = n;
          vs.push_back(n);
        }
        Formula b = go(f.body(), env);
        return f.is_exists() ? Formula::exists(vs, b) : Formula::forall(vs, b);
      }
      default:
        return f;
    }
  }
};

}  // namespace

bool alpha_equal(const Formula& a, const Formula& b) {
  Canon ca{false}, cb{false};
  return ca.go(a, {}) == cb.go(b, {});
}

Formula normalize_vars(const Formula& f) {
  Canon c{true};
  return c.go(f, {});
}

}  // namespace aet
