#include "aet/planner.hpp"

#include <algorithm>
#include <optional>

#include "aet/errors.hpp"

namespace aet {

bool BindingState::instantiated(const Term& t) const {
  std::vector<std::string> vs;
  collect_vars(t, vs);
  for (const auto& v : vs)
    if (!bound(v)) return false;
  return true;
}

void BindingState::bind(const std::string& v) {
  if (!bound_.insert(v).second) return;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    auto [a, b] = links_[i];
    if (a == v) bind(b);
    if (b == v) bind(a);
  }
}

void BindingState::bind_all(const Term& t) {
  std::vector<std::string> vs;
  collect_vars(t, vs);
  for (const auto& v : vs) bind(v);
}

void BindingState::link(const std::string& a, const std::string& b) {
  if (bound(a) || bound(b)) {
    bind(a);
    bind(b);
    return;
  }
  links_.emplace_back(a, b);
}

bool is_comparison_pred(const std::string& pred, std::size_t arity) {
  if (arity != 2) return false;
  return pred == "<" || pred == ">" || pred == "=<" || pred == ">=" || pred == "\\=" || pred == "t_precedes" ||
         pred == "t_before" || pred == "sql_date_=<" || pred == "sql_date_<";
}

FiniteVerdict is_potentially_finite(const Formula& atom, const BindingState& state, const CompiledTheory& theory) {
  FiniteVerdict v;
  v.after = state;
  if (atom.pred() == "trl_select" && atom.arity() == 2) {
    v.finite = true;
    v.after.bind_all(atom.args()[0]);
    return v;
  }
  auto cls = theory.relation_class(atom);
  if (!cls) throw UndeclaredPredicate("no relation declaration for " + atom.key());
  const auto& args = atom.args();
  auto bind_everything = [&]() {
    for (const auto& a : args) v.after.bind_all(a);
  };
  if (*cls == RelationClass::Database) {
    v.finite = true;
    bind_everything();
    return v;
  }
  auto pats = theory.call_pattern_index.find(atom.key());
  if (pats != theory.call_pattern_index.end()) {
    for (int id : pats->second) {
      const CallPattern& cp = theory.call_patterns[id];
      bool ok = true;
      for (auto i : cp.in)
        if (i >= args.size() || !state.instantiated(args[i])) ok = false;
      if (!ok) continue;
      v.finite = true;
      for (auto i : cp.out)
        if (i < args.size()) v.after.bind_all(args[i]);
      return v;
    }
    return v;
  }
  if (*cls == RelationClass::Executable) {
    v.finite = args.size() >= 2 && state.instantiated(args[1]);
    if (v.finite) bind_everything();
    return v;
  }
  std::size_t known = 0;
  for (const auto& a : args)
    if (state.instantiated(a)) ++known;
  if (is_comparison_pred(atom.pred(), atom.arity()))
    v.finite = known == args.size();
  else
    v.finite = known + 1 >= args.size();
  if (v.finite) bind_everything();
  return v;
}

namespace {

class Planner {
 public:
  explicit Planner(const CompiledTheory& th) : th_(th) {}

  std::optional<Formula> plan(const Formula& f, BindingState& st, std::vector<Formula>& residue) {
    switch (f.kind()) {
      case FormulaKind::True:
      case FormulaKind::False:
      case FormulaKind::Mismatch:
        return f;
      case FormulaKind::Atom: {
        auto v = is_potentially_finite(f, st, th_);
        if (!v.finite) {
          residue.push_back(f);
          return std::nullopt;
        }
        st = v.after;
        return f;
      }
      case FormulaKind::Equality: {
        const Term &l = f.lhs(), &r = f.rhs();
        if (st.instantiated(l)) {
          st.bind_all(r);
        } else if (st.instantiated(r)) {
          st.bind_all(l);
        } else if (l.is_var() && r.is_var()) {
          st.link(l.name(), r.name());
        }
        return f;
      }
      case FormulaKind::And:
        return plan_conj(conjuncts(f), st, residue);
      case FormulaKind::Exists: {
        BindingState inner = scoped(st, f.vars());
        auto body = plan(f.body(), inner, residue);
        if (!body) return std::nullopt;
        for (const auto& v : inner.vars())
          if (std::find(f.vars().begin(), f.vars().end(), v) == f.vars().end()) st.bind(v);
        return Formula::exists(f.vars(), *body);
      }
      case FormulaKind::Forall: {
        if (!f.body().is_impl()) {
          residue.push_back(f);
          return std::nullopt;
        }
        BindingState inner = scoped(st, f.vars());
        auto body = plan_impl(f.body(), inner, residue);
        if (!body) return std::nullopt;
        return Formula::forall(f.vars(), *body);
      }
      case FormulaKind::Impl: {
        BindingState inner = st;
        return plan_impl(f, inner, residue);
      }
    }
    return std::nullopt;
  }

 private:
  static BindingState scoped(const BindingState& st, const std::vector<std::string>& vars) {
    BindingState inner;
    for (const auto& v : st.vars())
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) inner.bind(v);
    return inner;
  }

  std::optional<Formula> plan_impl(const Formula& f, BindingState& st, std::vector<Formula>& residue) {
    auto a = plan(f.ante(), st, residue);
    if (!a) return std::nullopt;
    auto c = plan(f.cons(), st, residue);
    if (!c) return std::nullopt;
    return Formula::impl(*a, *c);
  }

  std::optional<Formula> plan_conj(const std::vector<Formula>& items, BindingState& st,
                                   std::vector<Formula>& residue) {
    std::vector<Formula> out;
    std::vector<Formula> frozen;
    auto attempt = [&](const Formula& g) {
      BindingState trial = st;
      std::vector<Formula> ignored;
      auto p = plan(g, trial, ignored);
      if (!p) return false;
      st = trial;
      out.push_back(*p);
      return true;
    };
    auto thaw = [&]() {
      bool progress = true;
      while (progress) {
        progress = false;
        for (std::size_t i = 0; i < frozen.size(); ++i) {
          if (attempt(frozen[i])) {
            frozen.erase(frozen.begin() + static_cast<long>(i));
            progress = true;
            break;
          }
        }
      }
    };
    for (const auto& g : items) {
      if (attempt(g))
        thaw();
      else
        frozen.push_back(g);
    }
    if (!frozen.empty()) {
      for (const auto& g : frozen) {
        BindingState trial = st;
        std::vector<Formula> inner;
        plan(g, trial, inner);
        residue.insert(residue.end(), inner.begin(), inner.end());
      }
      return std::nullopt;
    }
    return Formula::conj(out);
  }

  const CompiledTheory& th_;
};

}  // namespace

Formula rearrange(const Formula& f, const CompiledTheory& theory, const BindingState& initial) {
  Planner p(theory);
  BindingState st = initial;
  std::vector<Formula> residue;
  auto out = p.plan(f, st, residue);
  if (!out) throw NoFiniteStrategy(residue);
  // Answers range over the free variables, so each must end up instantiated.
  for (const auto& v : free_variables(f)) {
    if (st.bound(v)) continue;
    std::vector<Formula> atoms;
    collect_atoms(f, atoms);
    for (const auto& a : atoms) {
      std::vector<std::string> vs = term_vars(a.args());
      if (std::find(vs.begin(), vs.end(), v) != vs.end()) residue.push_back(a);
    }
    throw NoFiniteStrategy(residue);
  }
  return *out;
}

Formula rearrange(const Formula& f, const CompiledTheory& theory) { return rearrange(f, theory, BindingState{}); }

}  // namespace aet
