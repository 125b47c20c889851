#include "aet/translator.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "aet/errors.hpp"
#include "aet/subst.hpp"

namespace aet {

int Translation::assumption_cost() const {
  int c = 0;
  for (const auto& a : assumptions) c += a.cost;
  return c;
}

namespace {

using TermFn = std::function<Term(const Term&)>;

Term map_term(const Term& t, const TermFn& fn) {
  Term r = fn(t);
  if (!r.null()) return r;
  if (t.ground() && !contains_discharge(t)) return t;
  switch (t.kind()) {
    case TermKind::Compound: {
      std::vector<Term> as;
      for (const auto& a : t.args()) as.push_back(map_term(a, fn));
      return Term::compound(t.name(), std::move(as));
    }
    case TermKind::Skolem: {
      std::vector<Term> as;
      for (const auto& a : t.args()) as.push_back(map_term(a, fn));
      return Term::skolem(t.index(), std::move(as));
    }
    case TermKind::Named:
      return Term::named(t.name(), map_term(t.id(), fn));
    default:
      return t;
  }
}

Formula map_terms(const Formula& f, const TermFn& fn) {
  auto ts = [&](const std::vector<Term>& v) {
    std::vector<Term> out;
    for (const auto& t : v) out.push_back(map_term(t, fn));
    return out;
  };
  switch (f.kind()) {
    case FormulaKind::Atom:
      return Formula::atom(f.pred(), ts(f.args()));
    case FormulaKind::Equality:
      return Formula::eq(map_term(f.lhs(), fn), map_term(f.rhs(), fn));
    case FormulaKind::Mismatch:
      return Formula::mismatch(map_term(f.lhs(), fn), map_term(f.rhs(), fn));
    case FormulaKind::And:
      return Formula::conj(map_terms(f.left(), fn), map_terms(f.right(), fn));
    case FormulaKind::Impl:
      return Formula::impl(map_terms(f.ante(), fn), map_terms(f.cons(), fn));
    case FormulaKind::Exists:
      return Formula::exists(f.vars(), map_terms(f.body(), fn));
    case FormulaKind::Forall:
      return Formula::forall(f.vars(), map_terms(f.body(), fn));
    default:
      return f;
  }
}

using Back = std::map<int, std::string>;

Formula undischarge(const Formula& f, const Back& back) {
  return map_terms(f, [&](const Term& t) -> Term {
    if (!t.is_discharge()) return {};
    auto it = back.find(t.index());
    return it == back.end() ? t : Term::var(it->second);
  });
}

Term undischarge(const Term& t, const Back& back) {
  return map_term(t, [&](const Term& x) -> Term {
    if (!x.is_discharge()) return {};
    auto it = back.find(x.index());
    return it == back.end() ? x : Term::var(it->second);
  });
}

void count_in(const Term& t, int idx, int& n) {
  if (t.is_discharge()) {
    if (t.index() == idx) ++n;
    return;
  }
  for (const auto& a : t.args()) count_in(a, idx, n);
}

int count_discharge(const Formula& f, int idx) {
  int n = 0;
  switch (f.kind()) {
    case FormulaKind::Atom:
    case FormulaKind::Equality:
    case FormulaKind::Mismatch:
      for (const auto& a : f.args()) count_in(a, idx, n);
      return n;
    case FormulaKind::And:
    case FormulaKind::Impl:
      return count_discharge(f.left(), idx) + count_discharge(f.right(), idx);
    case FormulaKind::Exists:
    case FormulaKind::Forall:
      return count_discharge(f.body(), idx);
    default:
      return 0;
  }
}

void discharges_in(const Term& t, std::set<int>& out) {
  if (t.is_discharge()) out.insert(t.index());
  for (const auto& a : t.args()) discharges_in(a, out);
}

std::set<int> discharges_in(const Formula& f) {
  std::set<int> out;
  std::vector<Formula> atoms;
  collect_atoms(f, atoms);
  for (const auto& a : atoms)
    for (const auto& t : a.args()) discharges_in(t, out);
  std::function<void(const Formula&)> eqs = [&](const Formula& g) {
    switch (g.kind()) {
      case FormulaKind::Equality:
      case FormulaKind::Mismatch:
        for (const auto& t : g.args()) discharges_in(t, out);
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
  return out;
}

// Atoms and equalities of a conjunction usable as context.
void context_items(const Formula& f, std::vector<Formula>& out) {
  for (const auto& c : conjuncts(f))
    if (c.is_atom() || c.is_eq()) out.push_back(c);
}

// An untranslated atom together with the context the schemas give it.
struct Site {
  std::vector<int> path;
  Formula atom;
  std::vector<Formula> context;
  Back back;
  std::set<int> existential;
  std::map<int, Formula> scope;  // body of the binding quantifier
};

class Collector {
 public:
  Collector(const CompiledTheory& th, Session& s) : th_(th), session_(s) {}

  std::vector<Site> run(const Formula& f) {
    Back back;
    Substitution sub;
    for (const auto& v : free_variables_ordered(f)) {
      Term d = session_.fresh_discharge(v);
      back[d.index()] = v;
      sub.set_raw(v, d);
    }
    Formula g = apply(sub, f);
    std::map<int, Formula> scope;
    for (const auto& [i, v] : back) scope[i] = g;
    walk(g, {}, {}, back, {}, scope);
    return std::move(out_);
  }

 private:
  void walk(const Formula& f, std::vector<int> path, std::vector<Formula> ctx, Back back, std::set<int> ex,
            std::map<int, Formula> scope) {
    auto child = [&](int i) {
      auto p = path;
      p.push_back(i);
      return p;
    };
    switch (f.kind()) {
      case FormulaKind::Atom:
        if (!th_.is_declared(f)) out_.push_back(Site{path, f, ctx, back, ex, scope});
        return;
      case FormulaKind::And: {
        auto lc = ctx, rc = ctx;
        context_items(f.right(), lc);
        context_items(f.left(), rc);
        walk(f.left(), child(0), lc, back, ex, scope);
        walk(f.right(), child(1), rc, back, ex, scope);
        return;
      }
      case FormulaKind::Impl: {
        walk(f.ante(), child(0), ctx, back, ex, scope);
        auto cc = ctx;
        context_items(f.ante(), cc);
        walk(f.cons(), child(1), cc, back, ex, scope);
        return;
      }
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        Substitution sub;
        std::vector<int> ids;
        for (const auto& v : f.vars()) {
          Term d = session_.fresh_discharge(v);
          sub.set_raw(v, d);
          back[d.index()] = v;
          ids.push_back(d.index());
        }
        Formula body = apply(sub, f.body());
        for (int i : ids) scope[i] = body;
        if (f.is_exists()) {
          for (int i : ids) ex.insert(i);
          walk(body, child(0), ctx, back, ex, scope);
        } else if (body.is_impl()) {
          // A universal bound over an antecedent reads existentially there.
          auto ante_ex = ex;
          for (int i : ids) ante_ex.insert(i);
          auto p = child(0);
          auto p0 = p;
          p0.push_back(0);
          walk(body.ante(), p0, ctx, back, ante_ex, scope);
          auto cc = ctx;
          context_items(body.ante(), cc);
          auto p1 = p;
          p1.push_back(1);
          walk(body.cons(), p1, cc, back, ex, scope);
        } else {
          walk(body, child(0), ctx, back, ex, scope);
        }
        return;
      }
      default:
        return;
    }
  }

  const CompiledTheory& th_;
  Session& session_;
  std::vector<Site> out_;
};

std::vector<std::string> equiv_vars(const CompiledEquiv& e) {
  std::vector<std::string> vs = e.lhs_vars;
  auto add = [&](const Formula& f) {
    for (const auto& v : all_variables(f))
      if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
  };
  for (const auto& l : e.lhs) add(l);
  add(e.rhs);
  add(e.conds);
  return vs;
}

struct Rewrite {
  Formula replacement;  // variable form
  StepRecord step;
};

// Renames bound variables carrying a fresh-name suffix back to their base
// name when that name is unused.
Formula tidy(const Formula& f) {
  std::set<std::string> used = all_variables(f);
  std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
    switch (g.kind()) {
      case FormulaKind::And:
        return Formula::conj(go(g.left()), go(g.right()));
      case FormulaKind::Impl:
        return Formula::impl(go(g.ante()), go(g.cons()));
      case FormulaKind::Exists:
      case FormulaKind::Forall: {
        std::vector<std::string> vs;
        Substitution s;
        for (const auto& v : g.vars()) {
          auto p = v.find("__");
          std::string base = p == std::string::npos || p == 0 ? v : v.substr(0, p);
          if (base != v && !used.count(base)) {
            used.insert(base);
            s.set_raw(v, Term::var(base));
            vs.push_back(base);
          } else {
            vs.push_back(v);
          }
        }
        Formula body = go(s.empty() ? g.body() : apply(s, g.body()));
        return g.is_exists() ? Formula::exists(vs, body) : Formula::forall(vs, body);
      }
      default:
        return g;
    }
  };
  return go(f);
}

Formula step_result(const Formula& f, const std::vector<int>& path, const Formula& replacement,
                    const CompiledTheory& theory, const SimplifyOptions& opt) {
  return tidy(simplify(replace_at(f, path, replacement), theory, opt));
}

std::string assumption_key(const std::vector<AssumptionInstance>& as) {
  std::set<std::string> ks;
  for (const auto& a : as) ks.insert(to_string(a.goal) + "|" + a.justification);
  std::string s;
  for (const auto& k : ks) s += k + ";";
  return s;
}

void add_assumptions(std::vector<AssumptionInstance>& into, const std::vector<AssumptionInstance>& more) {
  for (const auto& a : more) {
    bool dup = false;
    for (const auto& b : into)
      if (b.goal == a.goal && b.justification == a.justification) dup = true;
    if (!dup) into.push_back(a);
  }
}

class Search {
 public:
  Search(const CompiledTheory& th, const RelStore& store, const TranslateConfig& cfg, Session& session,
         TraceSink* trace)
      : th_(th), cfg_(cfg), session_(session), prover_(th, store, session, cfg.search) {
    prover_.set_extra_facts(cfg.facts);
    prover_.set_trace(trace);
  }

  std::vector<Translation> run(const Formula& source) {
    Formula start = tidy(simplify(source, th_, cfg_.simplify));
    State s{start, {}, {}};
    dfs(s);
    if (found_.empty()) {
      if (budget_hit_)
        throw StepBudgetExceeded("no translation within " + std::to_string(cfg_.step_budget) + " steps");
      std::string msg = "no effective translation";
      for (const auto& r : stuck_reasons_) msg += "; " + r;
      throw NoEffectiveTranslation(msg, stuck_);
    }
    std::stable_sort(found_.begin(), found_.end(), [](const Translation& a, const Translation& b) {
      if (a.assumption_cost() != b.assumption_cost()) return a.assumption_cost() < b.assumption_cost();
      return a.steps.size() < b.steps.size();
    });
    for (auto& t : found_) t.source = source;
    return found_;
  }

 private:
  struct State {
    Formula f;
    std::vector<AssumptionInstance> assumptions;
    std::vector<StepRecord> steps;
  };

  bool done() const { return found_.size() >= cfg_.max_translations; }

  // Returns true when some translation was completed below this state.
  bool dfs(const State& s) {
    if (done()) return false;
    std::string key = to_string(s.f) + "#" + assumption_key(s.assumptions);
    if (!visited_.insert(key).second) return false;
    if (++states_ > cfg_.max_states) {
      budget_hit_ = true;
      return false;
    }
    Collector col(th_, session_);
    std::vector<Site> sites = col.run(s.f);
    if (sites.empty()) {
      complete(s);
      return true;
    }
    if (static_cast<int>(s.steps.size()) >= cfg_.step_budget) {
      budget_hit_ = true;
      return false;
    }
    bool any_rewrite = false;
    std::vector<std::string> reasons;
    for (const auto& site : sites) {
      std::vector<Rewrite> rws = rewrites(site, reasons);
      if (rws.empty()) continue;
      any_rewrite = true;
      bool ok = false;
      for (auto& rw : rws) {
        State n;
        n.f = step_result(s.f, site.path, rw.replacement, th_, cfg_.simplify);
        rw.step.result = n.f;
        n.assumptions = s.assumptions;
        add_assumptions(n.assumptions, rw.step.assumptions);
        n.steps = s.steps;
        n.steps.push_back(rw.step);
        if (dfs(n)) ok = true;
        if (done()) return true;
      }
      if (ok) return true;
    }
    if (!any_rewrite && stuck_.empty()) {
      Back all;
      for (const auto& site : sites)
        for (const auto& [i, v] : site.back) all[i] = v;
      for (const auto& site : sites) stuck_.push_back(undischarge(site.atom, all));
      stuck_reasons_ = reasons;
    }
    return false;
  }

  void complete(const State& s) {
    std::string key = to_string(normalize_vars(s.f)) + "#" + assumption_key(s.assumptions);
    if (!complete_keys_.insert(key).second) return;
    Translation t;
    t.target = s.f;
    t.assumptions = s.assumptions;
    t.steps = s.steps;
    found_.push_back(std::move(t));
  }

  std::vector<Rewrite> rewrites(const Site& site, std::vector<std::string>& reasons) {
    std::vector<Rewrite> out;
    auto it = th_.equiv_index.find(site.atom.key());
    std::string shown = to_string(undischarge(site.atom, site.back));
    if (it == th_.equiv_index.end()) {
      reasons.push_back(shown + ": no equivalence has " + site.atom.key() + " on its left-hand side");
      return out;
    }
    std::set<std::string> seen;
    for (auto [eid, k] : it->second) {
      const CompiledEquiv& e = th_.equivs[eid];
      Substitution ren;
      for (const auto& v : equiv_vars(e)) ren.set_raw(v, Term::var(session_.fresh_var(v)));
      Substitution theta;
      if (!match(apply(ren, e.lhs[k]), site.atom, theta)) continue;
      if (!exists_vars_ok(e, ren, theta, site)) {
        reasons.push_back(shown + ": " + e.label() + " needs its existential arguments bound only here");
        continue;
      }
      std::vector<Formula> rest;
      for (std::size_t j = 0; j < e.lhs.size(); ++j)
        if (static_cast<int>(j) != k) rest.push_back(apply(theta, apply(ren, e.lhs[j])));
      for (const auto& c : conjuncts(e.conds)) rest.push_back(apply(theta, apply(ren, c)));
      Formula goal = Formula::conj(rest);
      std::vector<Formula> ctx = site.context;
      ctx.push_back(site.atom);
      std::vector<ProofResult> proofs;
      if (goal.is_true()) {
        proofs.push_back({});
      } else {
        proofs = prover_.prove(goal, ctx, cfg_.allow_assumptions);
      }
      if (proofs.empty()) {
        reasons.push_back(shown + ": conditions of " + e.label() + " not provable");
        continue;
      }
      std::size_t taken = 0;
      for (const auto& pr : proofs) {
        if (taken >= cfg_.proofs_per_rule) break;
        Substitution sigma = theta;
        for (const auto& [v, t] : pr.binding.map()) sigma.set_raw(v, t);
        Substitution full;
        for (const auto& [v, t] : ren.map()) {
          Term x = apply(sigma, t);
          full.set_raw(v, apply(sigma, x));
        }
        Formula rhs = apply(sigma, apply(ren, e.rhs));
        if (!admissible(rhs, ren, site)) continue;
        Formula repl = undischarge(rhs, site.back);
        std::string key = to_string(repl) + "#" + assumption_key(pr.assumptions);
        if (!seen.insert(key).second) continue;
        ++taken;
        Rewrite rw;
        rw.replacement = repl;
        StepRecord& st = rw.step;
        st.path = site.path;
        st.rule = e.id;
        st.rule_label = e.label();
        Substitution m;
        for (const auto& [v, t] : full.map()) m.set_raw(v, undischarge(t, site.back));
        st.matcher = m;
        for (const auto& c : ctx) st.context.push_back(undischarge(c, site.back));
        st.conditions = undischarge(apply(sigma, goal), site.back);
        for (auto a : pr.assumptions) {
          a.goal = undischarge(a.goal, site.back);
          for (auto& c : a.context) c = undischarge(c, site.back);
          st.assumptions.push_back(a);
        }
        st.replaced = undischarge(site.atom, site.back);
        st.replacement = repl;
        out.push_back(std::move(rw));
      }
    }
    return out;
  }

  // Existential LHS variables must fall on distinct existentially read
  // discharge constants that occur nowhere else in their scope.
  bool exists_vars_ok(const CompiledEquiv& e, const Substitution& ren, const Substitution& theta,
                      const Site& site) const {
    std::set<int> used;
    for (const auto& v : e.lhs_vars) {
      Term t = apply(theta, apply(ren, Term::var(v)));
      if (!t.is_discharge()) return false;
      int i = t.index();
      if (!site.existential.count(i) || !used.insert(i).second) return false;
      auto sc = site.scope.find(i);
      if (sc == site.scope.end()) return false;
      if (count_discharge(sc->second, i) != count_discharge(site.atom, i)) return false;
    }
    return true;
  }

  // The replacement may not mention unbound rule variables or discharge
  // constants foreign to the site.
  bool admissible(const Formula& rhs, const Substitution& ren, const Site& site) const {
    auto fv = free_variables(rhs);
    for (const auto& [v, t] : ren.map())
      if (fv.count(t.name())) return false;
    for (int i : discharges_in(rhs))
      if (!site.back.count(i)) return false;
    return true;
  }

  const CompiledTheory& th_;
  const TranslateConfig& cfg_;
  Session& session_;
  Prover prover_;
  std::vector<Translation> found_;
  std::set<std::string> visited_, complete_keys_;
  std::size_t states_ = 0;
  bool budget_hit_ = false;
  std::vector<Formula> stuck_;
  std::vector<std::string> stuck_reasons_;
};

}  // namespace

Formula subformula(const Formula& f, const std::vector<int>& path) {
  Formula g = f;
  for (int i : path) {
    if (g.is_quant()) {
      g = g.body();
    } else if (g.is_and() || g.is_impl()) {
      g = i == 0 ? g.left() : g.right();
    } else {
      throw Error("path leaves the formula");
    }
  }
  return g;
}

namespace {

Formula replace_rec(const Formula& f, const std::vector<int>& path, std::size_t d, const Formula& with) {
  if (d == path.size()) return with;
  int i = path[d];
  switch (f.kind()) {
    case FormulaKind::And:
      return i == 0 ? Formula::conj(replace_rec(f.left(), path, d + 1, with), f.right())
                    : Formula::conj(f.left(), replace_rec(f.right(), path, d + 1, with));
    case FormulaKind::Impl:
      return i == 0 ? Formula::impl(replace_rec(f.ante(), path, d + 1, with), f.cons())
                    : Formula::impl(f.ante(), replace_rec(f.cons(), path, d + 1, with));
    case FormulaKind::Exists:
      return Formula::exists(f.vars(), replace_rec(f.body(), path, d + 1, with));
    case FormulaKind::Forall:
      return Formula::forall(f.vars(), replace_rec(f.body(), path, d + 1, with));
    default:
      throw Error("path leaves the formula");
  }
}

}  // namespace

Formula replace_at(const Formula& f, const std::vector<int>& path, const Formula& with) {
  return replace_rec(f, path, 0, with);
}

std::vector<Translation> translate(const Formula& source, const CompiledTheory& theory, const RelStore& store,
                                   const TranslateConfig& config, Session* session, TraceSink* trace) {
  Session local;
  Search search(theory, store, config, session ? *session : local, trace);
  return search.run(source);
}

Formula tidy_names(const Formula& f) { return tidy(f); }

bool is_database_level(const Formula& f, const CompiledTheory& theory) {
  std::vector<Formula> atoms;
  collect_atoms(f, atoms);
  for (const auto& a : atoms)
    if (!theory.is_declared(a)) return false;
  return true;
}

Formula replay(const Formula& source, const std::vector<StepRecord>& steps, const CompiledTheory& theory,
               const SimplifyOptions& opt) {
  Formula f = tidy(simplify(source, theory, opt));
  for (const auto& s : steps) f = step_result(f, s.path, s.replacement, theory, opt);
  return f;
}

std::vector<std::string> describe_steps(const Translation& t) {
  std::vector<std::string> out;
  int n = 0;
  for (const auto& s : t.steps) {
    std::ostringstream os;
    os << ++n << ". " << to_string(s.replaced) << " => " << to_string(s.replacement) << " by " << s.rule_label;
    if (!s.conditions.null() && !s.conditions.is_true()) os << "; conditions " << to_string(s.conditions);
    for (const auto& a : s.assumptions) os << "; assumed " << to_string(a.goal) << " (" << a.justification << ")";
    out.push_back(os.str());
  }
  return out;
}

}  // namespace aet
