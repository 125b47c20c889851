#include "aet/simplifier.hpp"

#include <algorithm>

#include "aet/prover.hpp"
#include "aet/subst.hpp"

namespace aet {

namespace {

bool contains(const std::vector<std::string>& vs, const std::string& v) {
  return std::find(vs.begin(), vs.end(), v) != vs.end();
}

std::string primed(const std::string& v, const std::set<std::string>& avoid) {
  std::string n = v;
  do n += '\'';
  while (avoid.count(n));
  return n;
}

// Renames bound variables in `vars` that appear in `clash`, returning the new
// variable list and the renamed body.
std::pair<std::vector<std::string>, Formula> rename_bound(const std::vector<std::string>& vars, const Formula& body,
                                                          const std::set<std::string>& clash,
                                                          std::set<std::string> avoid) {
  Substitution s;
  std::vector<std::string> out;
  for (const auto& v : vars) {
    if (clash.count(v)) {
      std::string n = primed(v, avoid);
      avoid.insert(n);
      s.set_raw(v, Term::var(n));
      out.push_back(n);
    } else {
      out.push_back(v);
    }
  }
  return {out, s.empty() ? body : apply(s, body)};
}

std::set<std::string> set_union(std::set<std::string> a, const std::set<std::string>& b) {
  a.insert(b.begin(), b.end());
  return a;
}

}  // namespace

// --- quantifier motion ----------------------------------------------------

Formula move_quantifiers(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::And: {
      Formula l = move_quantifiers(f.left());
      Formula r = move_quantifiers(f.right());
      if (!l.is_exists() && !r.is_exists()) return Formula::conj(l, r);
      std::set<std::string> avoid = set_union(all_variables(l), all_variables(r));
      std::vector<std::string> vars;
      Formula lb = l, rb = r;
      if (l.is_exists()) {
        auto [vs, b] = rename_bound(l.vars(), l.body(), free_variables(r), avoid);
        vars = vs;
        lb = b;
        avoid.insert(vs.begin(), vs.end());
      }
      if (r.is_exists()) {
        std::set<std::string> clash = free_variables(lb);
        clash.insert(vars.begin(), vars.end());
        auto [vs, b] = rename_bound(r.vars(), r.body(), clash, avoid);
        vars.insert(vars.end(), vs.begin(), vs.end());
        rb = b;
      }
      return Formula::exists(vars, Formula::conj(lb, rb));
    }
    case FormulaKind::Exists: {
      Formula b = move_quantifiers(f.body());
      if (!b.is_exists()) return Formula::exists(f.vars(), b);
      std::vector<std::string> vars = f.vars();
      for (const auto& v : b.vars())
        if (!contains(vars, v)) vars.push_back(v);
      return Formula::exists(vars, b.body());
    }
    case FormulaKind::Forall: {
      Formula b = move_quantifiers(f.body());
      if (!b.is_forall()) return Formula::forall(f.vars(), b);
      std::vector<std::string> vars = f.vars();
      for (const auto& v : b.vars())
        if (!contains(vars, v)) vars.push_back(v);
      return Formula::forall(vars, b.body());
    }
    case FormulaKind::Impl: {
      Formula a = move_quantifiers(f.ante());
      Formula c = move_quantifiers(f.cons());
      if (!a.is_exists()) return Formula::impl(a, c);
      std::set<std::string> avoid = set_union(all_variables(a), all_variables(c));
      auto [vs, b] = rename_bound(a.vars(), a.body(), free_variables(c), avoid);
      return Formula::forall(vs, Formula::impl(b, c));
    }
    default:
      return f;
  }
}

// --- equalities -----------------------------------------------------------

namespace {

enum class Cmp { Same, Differ, Unknown };

bool opaque(const Term& t) { return t.is_var() || t.is_skolem() || t.is_discharge(); }

Cmp compare_terms(const Term& a, const Term& b) {
  if (a == b) return Cmp::Same;
  if (opaque(a) || opaque(b)) return Cmp::Unknown;
  if (a.kind() != b.kind()) return Cmp::Differ;
  switch (a.kind()) {
    case TermKind::Compound: {
      if (a.name() != b.name() || a.args().size() != b.args().size()) return Cmp::Differ;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (compare_terms(a.args()[i], b.args()[i]) == Cmp::Differ) return Cmp::Differ;
      return Cmp::Unknown;
    }
    case TermKind::Named:
      if (a.name() != b.name()) return Cmp::Differ;
      return compare_terms(a.id(), b.id()) == Cmp::Differ ? Cmp::Differ : Cmp::Unknown;
    default:
      return Cmp::Differ;
  }
}

Formula rewrite_equality(const Formula& f) {
  const Term& l = f.lhs();
  const Term& r = f.rhs();
  switch (compare_terms(l, r)) {
    case Cmp::Same:
      return Formula::truth();
    case Cmp::Differ:
      return Formula::mismatch(l, r);
    case Cmp::Unknown:
      break;
  }
  if (l.is_compound() && r.is_compound()) {
    std::vector<Formula> parts;
    for (std::size_t i = 0; i < l.args().size(); ++i)
      if (l.args()[i] != r.args()[i]) parts.push_back(rewrite_equality(Formula::eq(l.args()[i], r.args()[i])));
    return Formula::conj(parts);
  }
  if (l.is_named() && r.is_named()) return rewrite_equality(Formula::eq(l.id(), r.id()));
  return f;
}

// Finds an equality X = t with X in `vars` and X not in t; returns the
// index and the binding.
std::optional<std::pair<std::size_t, std::pair<std::string, Term>>> find_binding(
    const std::vector<Formula>& items, const std::vector<std::string>& vars) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Formula& it = items[i];
    if (!it.is_eq()) continue;
    const Term& l = it.lhs();
    const Term& r = it.rhs();
    if (l.is_var() && contains(vars, l.name()) && !occurs(l.name(), r)) return {{i, {l.name(), r}}};
    if (r.is_var() && contains(vars, r.name()) && !occurs(r.name(), l)) return {{i, {r.name(), l}}};
  }
  return std::nullopt;
}

}  // namespace

Formula eliminate_equalities(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Equality:
      return rewrite_equality(f);
    case FormulaKind::And:
      return Formula::conj(eliminate_equalities(f.left()), eliminate_equalities(f.right()));
    case FormulaKind::Exists: {
      std::vector<Formula> items = conjuncts(eliminate_equalities(f.body()));
      std::vector<std::string> vars = f.vars();
      while (auto hit = find_binding(items, vars)) {
        const auto& [idx, bnd] = *hit;
        Substitution s;
        s.set_raw(bnd.first, bnd.second);
        std::vector<Formula> next;
        for (std::size_t i = 0; i < items.size(); ++i)
          if (i != idx) next.push_back(apply(s, items[i]));
        items = std::move(next);
        vars.erase(std::find(vars.begin(), vars.end(), bnd.first));
      }
      return Formula::exists(vars, Formula::conj(items));
    }
    case FormulaKind::Forall: {
      Formula b = eliminate_equalities(f.body());
      std::vector<std::string> vars = f.vars();
      if (!b.is_impl()) return Formula::forall(vars, b);
      std::vector<Formula> ante = conjuncts(b.ante());
      Formula cons = b.cons();
      while (auto hit = find_binding(ante, vars)) {
        const auto& [idx, bnd] = *hit;
        Substitution s;
        s.set_raw(bnd.first, bnd.second);
        std::vector<Formula> next;
        for (std::size_t i = 0; i < ante.size(); ++i)
          if (i != idx) next.push_back(apply(s, ante[i]));
        ante = std::move(next);
        cons = apply(s, cons);
        vars.erase(std::find(vars.begin(), vars.end(), bnd.first));
      }
      return Formula::forall(vars, Formula::impl(Formula::conj(ante), cons));
    }
    case FormulaKind::Impl:
      return Formula::impl(eliminate_equalities(f.ante()), eliminate_equalities(f.cons()));
    default:
      return f;
  }
}

// --- ground evaluation ----------------------------------------------------

Formula evaluate_ground(const Formula& f, const CompiledTheory& theory) {
  switch (f.kind()) {
    case FormulaKind::Atom: {
      auto cls = theory.relation_class(f);
      if (!cls || *cls == RelationClass::Database) return f;
      if (!is_builtin(f.pred(), f.arity())) return f;
      for (const Term& t : f.args())
        if (!t.ground()) return f;
      return eval_builtin(f).kind == BuiltinOutcome::Succeed ? Formula::truth() : f;
    }
    case FormulaKind::And:
      return Formula::conj(evaluate_ground(f.left(), theory), evaluate_ground(f.right(), theory));
    case FormulaKind::Exists:
      return Formula::exists(f.vars(), evaluate_ground(f.body(), theory));
    case FormulaKind::Forall:
      return Formula::forall(f.vars(), evaluate_ground(f.body(), theory));
    case FormulaKind::Impl:
      return Formula::impl(evaluate_ground(f.ante(), theory), evaluate_ground(f.cons(), theory));
    default:
      return f;
  }
}

// --- cleanup --------------------------------------------------------------

namespace {

Formula quantify(bool exists, const std::vector<std::string>& vars, const Formula& body) {
  std::set<std::string> fv = free_variables(body);
  std::vector<std::string> keep;
  for (const auto& v : vars)
    if (fv.count(v) && !contains(keep, v)) keep.push_back(v);
  return exists ? Formula::exists(keep, body) : Formula::forall(keep, body);
}

}  // namespace

Formula cleanup(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::And: {
      Formula l = cleanup(f.left());
      Formula r = cleanup(f.right());
      if (l.is_false() || r.is_false()) return Formula::falsity();
      if (l.is_true()) return r;
      if (r.is_true()) return l;
      return Formula::conj(l, r);
    }
    case FormulaKind::Exists: {
      Formula b = cleanup(f.body());
      if (b.is_true() || b.is_false()) return b;
      if (b.is_exists()) {
        std::vector<std::string> vars = f.vars();
        for (const auto& v : b.vars())
          if (!contains(vars, v)) vars.push_back(v);
        return quantify(true, vars, b.body());
      }
      return quantify(true, f.vars(), b);
    }
    case FormulaKind::Forall: {
      Formula b = cleanup(f.body());
      if (b.is_true()) return b;
      return quantify(false, f.vars(), b);
    }
    case FormulaKind::Impl: {
      Formula a = cleanup(f.ante());
      Formula c = cleanup(f.cons());
      if (a.is_false() || c.is_true()) return Formula::truth();
      if (a.is_true()) return c;
      return Formula::impl(a, c);
    }
    default:
      return f;
  }
}

// --- mismatches -----------------------------------------------------------

Formula mismatch_to_false(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Mismatch:
      return Formula::falsity();
    case FormulaKind::And:
      return cleanup(Formula::conj(mismatch_to_false(f.left()), mismatch_to_false(f.right())));
    case FormulaKind::Exists:
      return cleanup(Formula::exists(f.vars(), mismatch_to_false(f.body())));
    case FormulaKind::Forall:
      return cleanup(Formula::forall(f.vars(), mismatch_to_false(f.body())));
    case FormulaKind::Impl:
      return cleanup(Formula::impl(mismatch_to_false(f.ante()), mismatch_to_false(f.cons())));
    default:
      return f;
  }
}

std::optional<std::pair<Term, Term>> find_mismatch(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::Mismatch:
      return std::make_pair(f.lhs(), f.rhs());
    case FormulaKind::And:
    case FormulaKind::Impl:
      if (auto m = find_mismatch(f.left())) return m;
      return find_mismatch(f.right());
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      return find_mismatch(f.body());
    default:
      return std::nullopt;
  }
}

// --- functional merging ---------------------------------------------------

namespace {

std::vector<Formula> shadow(const std::vector<Formula>& ctx, const std::vector<std::string>& vars) {
  std::vector<Formula> out;
  for (const Formula& c : ctx) {
    bool hit = false;
    for (const auto& v : free_variables(c))
      if (contains(vars, v)) hit = true;
    if (!hit) out.push_back(c);
  }
  return out;
}

class Merger {
 public:
  Merger(const CompiledTheory& th) : th_(th) {}
  std::size_t merges = 0;

  Formula run(const Formula& f, const std::vector<Formula>& ctx) {
    switch (f.kind()) {
      case FormulaKind::Atom:
      case FormulaKind::And: {
        std::vector<Formula> items = conjuncts(f);
        std::vector<Formula> seen = ctx;
        for (Formula& it : items) {
          if (it.is_atom()) {
            if (auto rep = merge_with(it, seen)) {
              it = *rep;
              continue;
            }
            seen.push_back(it);
          }
        }
        for (std::size_t i = 0; i < items.size(); ++i) {
          if (items[i].is_atom() || items[i].is_eq() || items[i].is_mismatch()) continue;
          std::vector<Formula> inner = ctx;
          for (std::size_t j = 0; j < items.size(); ++j)
            if (j != i && items[j].is_atom()) inner.push_back(items[j]);
          items[i] = run(items[i], inner);
        }
        return Formula::conj(items);
      }
      case FormulaKind::Exists:
        return Formula::exists(f.vars(), run(f.body(), shadow(ctx, f.vars())));
      case FormulaKind::Forall:
        return Formula::forall(f.vars(), run(f.body(), shadow(ctx, f.vars())));
      case FormulaKind::Impl: {
        Formula a = run(f.ante(), ctx);
        std::vector<Formula> inner = ctx;
        for (const Formula& c : conjuncts(a))
          if (c.is_atom()) inner.push_back(c);
        return Formula::impl(a, run(f.cons(), inner));
      }
      default:
        return f;
    }
  }

 private:
  const CompiledTheory& th_;

  std::optional<Formula> merge_with(const Formula& atom, const std::vector<Formula>& seen) {
    for (const FunctionDecl* d : th_.functions_for(atom.key())) {
      if (d->from_pos.empty()) continue;
      for (const Formula& other : seen) {
        if (!other.is_atom() || other.key() != atom.key()) continue;
        bool agree = true;
        for (std::size_t p : d->from_pos)
          if (other.args()[p] != atom.args()[p]) agree = false;
        if (!agree) continue;
        std::vector<Formula> eqs;
        for (std::size_t p : d->to_pos)
          if (other.args()[p] != atom.args()[p]) eqs.push_back(Formula::eq(other.args()[p], atom.args()[p]));
        ++merges;
        return Formula::conj(eqs);
      }
    }
    return std::nullopt;
  }
};

Formula merge_round(const Formula& f, const CompiledTheory& theory, std::size_t* merges) {
  Merger m(theory);
  Formula out = m.run(f, {});
  if (merges) *merges += m.merges;
  return out;
}

// --- redundancy -----------------------------------------------------------

class Redundancy {
 public:
  Redundancy(const CompiledTheory& th, int limit) : th_(th) {
    cfg_.initial_limit = limit;
    cfg_.max_limit = limit;
    cfg_.max_results = 1;
    cfg_.max_steps = 20000;
  }

  Formula run(const Formula& f, const std::vector<Formula>& ctx, const std::vector<std::string>& locals) {
    switch (f.kind()) {
      case FormulaKind::Atom:
      case FormulaKind::Equality:
      case FormulaKind::And: {
        std::vector<Formula> items = conjuncts(f);
        std::vector<bool> gone(items.size(), false);
        for (std::size_t i = 0; i < items.size(); ++i) {
          if (!items[i].is_atom() && !items[i].is_eq()) continue;
          std::vector<Formula> context = ctx;
          for (std::size_t j = 0; j < items.size(); ++j)
            if (j != i && !gone[j] && (items[j].is_atom() || items[j].is_eq())) context.push_back(items[j]);
          if (implied(items[i], context, locals, items, i)) gone[i] = true;
        }
        std::vector<Formula> kept;
        for (std::size_t i = 0; i < items.size(); ++i)
          if (!gone[i]) kept.push_back(items[i]);
        for (std::size_t i = 0; i < kept.size(); ++i) {
          if (kept[i].is_atom() || kept[i].is_eq() || kept[i].is_mismatch()) continue;
          std::vector<Formula> inner = ctx;
          for (std::size_t j = 0; j < kept.size(); ++j)
            if (j != i && (kept[j].is_atom() || kept[j].is_eq())) inner.push_back(kept[j]);
          kept[i] = run(kept[i], inner, {});
        }
        return Formula::conj(kept);
      }
      case FormulaKind::Exists:
        return Formula::exists(f.vars(), run(f.body(), shadow(ctx, f.vars()), f.vars()));
      case FormulaKind::Forall:
        return Formula::forall(f.vars(), run(f.body(), shadow(ctx, f.vars()), {}));
      case FormulaKind::Impl: {
        Formula a = run(f.ante(), ctx, {});
        std::vector<Formula> inner = ctx;
        for (const Formula& c : conjuncts(a))
          if (c.is_atom() || c.is_eq()) inner.push_back(c);
        return Formula::impl(a, run(f.cons(), inner, {}));
      }
      default:
        return f;
    }
  }

 private:
  const CompiledTheory& th_;
  SearchConfig cfg_;
  RelStore empty_;

  bool implied(const Formula& goal, const std::vector<Formula>& context, const std::vector<std::string>& locals,
               const std::vector<Formula>& items, std::size_t self) {
    if (context.empty() && goal.is_atom() && !th_.clauses_for(goal.key()).size()) return false;
    // Only existential variables confined to this conjunct may be bound.
    std::set<std::string> elsewhere;
    for (const Formula& c : context) {
      auto fv = free_variables(c);
      elsewhere.insert(fv.begin(), fv.end());
    }
    for (std::size_t j = 0; j < items.size(); ++j) {
      if (j == self) continue;
      auto fv = free_variables(items[j]);
      elsewhere.insert(fv.begin(), fv.end());
    }
    Session session;
    Substitution freeze;
    for (const auto& v : free_variables_ordered(goal))
      if (!contains(locals, v) || elsewhere.count(v)) freeze.set_raw(v, session.fresh_discharge(v));
    Formula g = freeze.empty() ? goal : apply(freeze, goal);
    std::vector<Formula> ctx;
    for (const Formula& c : context) ctx.push_back(freeze.empty() ? c : apply(freeze, c));
    Prover p(th_, empty_, session, cfg_);
    return !p.prove(g, ctx, false).empty();
  }
};

}  // namespace

Formula functional_merge(const Formula& f, const CompiledTheory& theory, std::size_t* merges) {
  Formula cur = f;
  for (int i = 0; i < 64; ++i) {
    Formula next = cleanup(eliminate_equalities(move_quantifiers(merge_round(cur, theory, merges))));
    if (next == cur) break;
    cur = next;
  }
  return cur;
}

Formula simplify(const Formula& f, const CompiledTheory& theory, const SimplifyOptions& opt) {
  Formula cur = f;
  for (int round = 0; round < opt.max_rounds; ++round) {
    Formula next = cleanup(move_quantifiers(cur));
    next = cleanup(eliminate_equalities(next));
    next = cleanup(evaluate_ground(next, theory));
    if (opt.merge) next = cleanup(eliminate_equalities(move_quantifiers(merge_round(next, theory, nullptr))));
    if (opt.redundancy && next == cur) next = cleanup(Redundancy(theory, opt.redundancy_limit).run(next, {}, {}));
    if (next == cur) break;
    cur = next;
  }
  return cur;
}

// --- assertions -----------------------------------------------------------

namespace {

void skolem_indices(const Term& t, std::set<int>& out) {
  if (t.is_skolem()) out.insert(t.index());
  for (const Term& a : t.args()) skolem_indices(a, out);
}

}  // namespace

AssertOutcome assert_simplify(const AssertionCache& cache, const Formula& assertion, const CompiledTheory& theory,
                              Session& session, const RelStore* store) {
  AssertOutcome out;
  std::vector<Formula> parts;
  if (!cache.clauses.empty()) parts.push_back(deskolemize(cache.clauses));
  parts.push_back(assertion);

  if (store) {
    // Stored tuples that share a function key with an asserted atom.
    std::vector<Formula> atoms;
    for (const Formula& p : parts) collect_atoms(p, atoms);
    std::set<Formula> extra;
    for (const Formula& a : atoms) {
      for (const FunctionDecl* d : theory.functions_for(a.key())) {
        bool ground_key = !d->from_pos.empty();
        for (std::size_t p : d->from_pos)
          if (!a.args()[p].ground() || contains_skolem(a.args()[p])) ground_key = false;
        if (!ground_key) continue;
        for (const Tuple& t : store->tuples(a.pred())) {
          if (t.size() != a.arity()) continue;
          bool agree = true;
          for (std::size_t p : d->from_pos)
            if (t[p] != a.args()[p]) agree = false;
          if (agree) extra.insert(Formula::atom(a.pred(), t));
        }
      }
    }
    for (const Formula& e : extra) parts.push_back(e);
  }

  Formula merged = functional_merge(Formula::conj(parts), theory, &out.merges);
  SimplifyOptions opt;
  opt.redundancy = false;
  merged = simplify(merged, theory, opt);
  if (auto m = find_mismatch(merged)) throw PresuppositionFailure(m->first, m->second);
  if (merged.is_false()) throw PresuppositionFailure(Term::constant("true"), Term::constant("false"));

  for (const Formula& c : skolemize(merged, session)) {
    if (!c.is_atom()) continue;
    std::set<int> sk;
    for (const Term& t : c.args()) skolem_indices(t, sk);
    if (sk.empty()) {
      out.graduated.push_back(c);
    } else {
      out.cache.clauses.push_back(c);
      out.cache.pending.insert(sk.begin(), sk.end());
    }
  }
  return out;
}

}  // namespace aet
