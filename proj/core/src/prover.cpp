#include "aet/prover.hpp"

#include <algorithm>
#include <memory>
#include <sstream>
#include <unordered_map>

namespace aet {

void SearchConfig::validate() const {
  if (initial_limit <= 0 || initial_limit > max_limit) throw Error("search config: need 0 < initial limit <= max limit");
  if (increment <= 0) throw Error("search config: increment must be positive");
  if (!(memo_fraction > 0 && memo_fraction < 1)) throw Error("search config: memo fraction must lie in (0,1)");
}

bool operator==(const AssumptionInstance& a, const AssumptionInstance& b) {
  return a.goal == b.goal && a.cost == b.cost && a.justification == b.justification && a.kind == b.kind;
}

bool operator<(const AssumptionInstance& a, const AssumptionInstance& b) {
  if (int c = Formula::compare(a.goal, b.goal)) return c < 0;
  if (a.justification != b.justification) return a.justification < b.justification;
  return a.cost < b.cost;
}

std::string to_string(const AssumptionInstance& a) {
  return to_string(a.kind) + " " + a.justification + ": " + to_string(a.goal) + " (cost " + std::to_string(a.cost) +
         ")";
}

namespace {

struct Ancestors {
  Formula goal;
  std::shared_ptr<const Ancestors> next;
  int depth = 0;
};
using AncPtr = std::shared_ptr<const Ancestors>;

struct CtxNode {
  Formula f;
  std::shared_ptr<const CtxNode> next;
};
using CtxPtr = std::shared_ptr<const CtxNode>;

struct Goal {
  enum Kind { Prove, Marker } kind = Prove;
  Formula f;
  AncPtr anc;
  CtxPtr ctx;
  bool restricted = false;
  int h = 0;
  // Marker fields: closes the sub-proof of a ground goal.
  std::string memo_key;
  int start_cost = 0;
  std::size_t start_assumptions = 0;
};

struct GoalNode;
using GoalList = std::shared_ptr<const GoalNode>;
struct GoalNode {
  Goal g;
  GoalList next;
  int hsum = 0;
};

GoalList cons(Goal g, GoalList next) {
  int hs = g.h + (next ? next->hsum : 0);
  return std::make_shared<const GoalNode>(GoalNode{std::move(g), std::move(next), hs});
}

int depth_of(const AncPtr& a) { return a ? a->depth : 0; }

AncPtr push_anc(const Formula& f, const AncPtr& a) {
  return std::make_shared<const Ancestors>(Ancestors{f, a, depth_of(a) + 1});
}

Term map_discharge(const Term& t, const std::map<int, Term>& back) {
  if (t.ground() && !contains_discharge(t)) return t;
  switch (t.kind()) {
    case TermKind::Discharge: {
      auto it = back.find(t.index());
      return it == back.end() ? t : it->second;
    }
    case TermKind::Compound: {
      std::vector<Term> args;
      for (const Term& a : t.args()) args.push_back(map_discharge(a, back));
      return Term::compound(t.name(), std::move(args));
    }
    case TermKind::Skolem: {
      std::vector<Term> args;
      for (const Term& a : t.args()) args.push_back(map_discharge(a, back));
      return Term::skolem(t.index(), std::move(args));
    }
    case TermKind::Named:
      return Term::named(t.name(), map_discharge(t.id(), back));
    default:
      return t;
  }
}

Formula map_discharge(const Formula& f, const std::map<int, Term>& back) {
  if (back.empty()) return f;
  switch (f.kind()) {
    case FormulaKind::Atom: {
      std::vector<Term> args;
      for (const Term& a : f.args()) args.push_back(map_discharge(a, back));
      return Formula::atom(f.pred(), std::move(args));
    }
    case FormulaKind::Equality:
      return Formula::eq(map_discharge(f.lhs(), back), map_discharge(f.rhs(), back));
    case FormulaKind::Mismatch:
      return Formula::mismatch(map_discharge(f.lhs(), back), map_discharge(f.rhs(), back));
    case FormulaKind::And:
      return Formula::conj(map_discharge(f.left(), back), map_discharge(f.right(), back));
    case FormulaKind::Exists:
      return Formula::exists(f.vars(), map_discharge(f.body(), back));
    case FormulaKind::Forall:
      return Formula::forall(f.vars(), map_discharge(f.body(), back));
    case FormulaKind::Impl:
      return Formula::impl(map_discharge(f.ante(), back), map_discharge(f.cons(), back));
    default:
      return f;
  }
}

class Engine {
 public:
  Engine(const CompiledTheory& theory, const RelStore& store, Session& session, const SearchConfig& config,
         const std::vector<Formula>& facts, TraceSink* trace, ProofStats& stats)
      : th_(theory), store_(store), session_(session), cfg_(config), facts_(facts), trace_(trace), stats_(stats) {}

  bool allow_assumptions = false;
  const std::map<std::string, int>* open = nullptr;
  const std::set<std::string>* counted = nullptr;
  int max_counted = 0;

  std::vector<ProofResult> run(const Formula& goal, const std::vector<Formula>& context) {
    // Freeze context variables so that the proof cannot instantiate them.
    Substitution freeze;
    std::vector<std::string> cvars;
    for (const Formula& c : context)
      for (const auto& v : free_variables_ordered(c))
        if (std::find(cvars.begin(), cvars.end(), v) == cvars.end()) cvars.push_back(v);
    for (const auto& v : cvars) {
      Term d = session_.fresh_discharge(v);
      freeze.set_raw(v, d);
      back_[d.index()] = Term::var(v);
    }
    for (const Formula& c : context) {
      Formula fc = freeze.empty() ? c : apply(freeze, c);
      if (fc.is_atom() || fc.is_eq()) context_.push_back(fc);
    }
    Formula g = freeze.empty() ? goal : apply(freeze, goal);
    for (const auto& v : free_variables_ordered(g)) request_vars_.push_back(v);

    Goal root;
    root.f = g;
    root.h = heuristic(g, nullptr);
    GoalList list = cons(root, nullptr);

    stats_ = ProofStats{};
    for (int limit = cfg_.initial_limit;; limit += cfg_.increment) {
      if (limit > cfg_.max_limit) limit = cfg_.max_limit;
      limit_ = limit;
      memo_.clear();
      cut_ = false;
      stop_ = false;
      g_search_ = g_real_ = 0;
      assumed_.clear();
      ++stats_.iterations;
      stats_.final_limit = limit;
      solve(list);
      if (!found_.empty()) break;
      if (!cut_) break;
      if (limit >= cfg_.max_limit || steps_exceeded_) {
        stats_.exhausted = true;
        break;
      }
    }
    std::vector<ProofResult> out;
    for (auto& f : found_) out.push_back(std::move(f.result));
    std::stable_sort(out.begin(), out.end(), [](const ProofResult& a, const ProofResult& b) { return a.cost < b.cost; });
    return out;
  }

 private:
  struct Found {
    std::string key;
    ProofResult result;
  };

  const CompiledTheory& th_;
  const RelStore& store_;
  Session& session_;
  const SearchConfig& cfg_;
  const std::vector<Formula>& facts_;
  TraceSink* trace_;
  ProofStats& stats_;

  std::vector<Formula> context_;
  std::map<int, Term> back_;
  std::vector<std::string> request_vars_;

  std::unordered_map<std::string, Term> b_;
  std::vector<std::string> trail_;
  long rename_counter_ = 0;

  int limit_ = 0;
  int g_search_ = 0, g_real_ = 0;
  std::vector<AssumptionInstance> assumed_;
  int counted_open_ = 0;
  std::map<std::string, int> memo_;
  bool cut_ = false, stop_ = false, steps_exceeded_ = false;
  std::vector<Found> found_;

  // --- bindings -----------------------------------------------------------

  Term walk(Term t) const {
    while (t.is_var()) {
      auto it = b_.find(t.name());
      if (it == b_.end()) break;
      t = it->second;
    }
    return t;
  }

  Term resolve(const Term& t0) const {
    Term t = walk(t0);
    if (t.ground()) return t;
    switch (t.kind()) {
      case TermKind::Compound: {
        std::vector<Term> args;
        for (const Term& a : t.args()) args.push_back(resolve(a));
        return Term::compound(t.name(), std::move(args));
      }
      case TermKind::Skolem: {
        std::vector<Term> args;
        for (const Term& a : t.args()) args.push_back(resolve(a));
        return Term::skolem(t.index(), std::move(args));
      }
      case TermKind::Named:
        return Term::named(t.name(), resolve(t.id()));
      default:
        return t;
    }
  }

  Formula resolve(const Formula& f) const {
    if (b_.empty()) return f;
    switch (f.kind()) {
      case FormulaKind::Atom: {
        std::vector<Term> args;
        for (const Term& a : f.args()) args.push_back(resolve(a));
        return Formula::atom(f.pred(), std::move(args));
      }
      case FormulaKind::Equality:
        return Formula::eq(resolve(f.lhs()), resolve(f.rhs()));
      case FormulaKind::Mismatch:
        return Formula::mismatch(resolve(f.lhs()), resolve(f.rhs()));
      case FormulaKind::True:
      case FormulaKind::False:
        return f;
      default: {
        Substitution s;
        for (const auto& v : free_variables(f)) {
          Term r = resolve(Term::var(v));
          if (!(r.is_var() && r.name() == v)) s.set_raw(v, r);
        }
        return s.empty() ? f : apply(s, f);
      }
    }
  }

  void bind(const std::string& v, const Term& t) {
    b_[v] = t;
    trail_.push_back(v);
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      b_.erase(trail_.back());
      trail_.pop_back();
    }
  }

  bool occurs_in(const std::string& v, const Term& t) const { return occurs(v, resolve(t)); }

  bool unify(const Term& a0, const Term& b0) {
    Term a = walk(a0), b = walk(b0);
    if (a.is_var() && b.is_var() && a.name() == b.name()) return true;
    if (a.is_var()) {
      if (occurs_in(a.name(), b)) return false;
      bind(a.name(), b);
      return true;
    }
    if (b.is_var()) {
      if (occurs_in(b.name(), a)) return false;
      bind(b.name(), a);
      return true;
    }
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case TermKind::Compound:
        if (a.name() != b.name() || a.args().size() != b.args().size()) return false;
        for (std::size_t i = 0; i < a.args().size(); ++i)
          if (!unify(a.args()[i], b.args()[i])) return false;
        return true;
      case TermKind::Skolem:
        if (a.index() != b.index() || a.args().size() != b.args().size()) return false;
        for (std::size_t i = 0; i < a.args().size(); ++i)
          if (!unify(a.args()[i], b.args()[i])) return false;
        return true;
      case TermKind::Named:
        return a.name() == b.name() && unify(a.id(), b.id());
      default:
        return a == b;
    }
  }

  bool unify_args(const std::vector<Term>& a, const std::vector<Term>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!unify(a[i], b[i])) return false;
    return true;
  }

  bool unify_atoms(const Formula& a, const Formula& b) {
    if (a.kind() != b.kind()) return false;
    if (a.is_atom() && (a.pred() != b.pred() || a.arity() != b.arity())) return false;
    return unify_args(a.args(), b.args());
  }

  // --- helpers ------------------------------------------------------------

  Formula rename(const Formula& f, const std::string& suffix) const {
    Substitution s;
    for (const auto& v : all_variables(f)) s.set_raw(v, Term::var(v + suffix));
    return s.empty() ? f : apply(s, f);
  }

  std::string fresh_suffix() { return "_G" + std::to_string(++rename_counter_); }

  std::vector<Formula> full_context(const CtxPtr& ctx) const {
    std::vector<Formula> out;
    for (CtxPtr c = ctx; c; c = c->next) out.push_back(c->f);
    out.insert(out.end(), context_.begin(), context_.end());
    return out;
  }

  bool context_has_pred(const Formula& f, const CtxPtr& ctx) const {
    const std::string key = f.key();
    for (CtxPtr c = ctx; c; c = c->next)
      if (c->f.is_atom() && c->f.key() == key) return true;
    for (const Formula& c : context_)
      if (c.is_atom() && c.key() == key) return true;
    return false;
  }

  bool cheap_assumable(const Formula& f) const {
    if (!allow_assumptions) return false;
    auto it = th_.assumable_index.find(f.key());
    if (it == th_.assumable_index.end()) return false;
    for (int i : it->second)
      if (th_.assumables[i].cost == 0) return true;
    return false;
  }

  int heuristic(const Formula& f, const CtxPtr& ctx) const {
    if (!f.is_atom()) return 0;
    if (context_has_pred(f, ctx) || cheap_assumable(f)) return 0;
    if (open && open->count(f.key())) return std::min(1, open->at(f.key()));
    return 1;
  }

  Goal make_goal(const Formula& f, const AncPtr& anc, const CtxPtr& ctx, bool restricted = false) const {
    Goal g;
    g.f = f;
    g.anc = anc;
    g.ctx = ctx;
    g.restricted = restricted;
    g.h = heuristic(f, ctx);
    return g;
  }

  // Arithmetic goals wait until their arguments are instantiated.
  bool delayable(const Goal& g) const {
    if (g.kind != Goal::Prove || !g.f.is_atom()) return false;
    if (!is_builtin(g.f.pred(), g.f.arity()) && !th_.is_arithmetic(g.f)) return false;
    if (g.f.pred() == "db_date_convert") {
      Formula r = resolve(g.f);
      return !r.args()[0].ground() && !r.args()[1].ground();
    }
    return !resolve(g.f).args().empty() && !std::all_of(g.f.args().begin(), g.f.args().end(), [&](const Term& t) {
      return resolve(t).ground();
    });
  }

  bool matches_context(const Goal& g) {
    bool hit = false;
    for (const Formula& c : full_context(g.ctx)) {
      if (!c.is_atom() || c.key() != g.f.key()) continue;
      const std::size_t mark = trail_.size();
      hit = unify_atoms(c, g.f);
      undo(mark);
      if (hit) break;
    }
    return hit;
  }

  void trace(const Goal& g, const char* kind, const Formula& head) {
    if (!trace_) return;
    std::ostringstream os;
    os << depth_of(g.anc) << ' ' << g_real_ << ' ' << kind << ' ' << to_string(resolve(head));
    trace_->push_back(os.str());
  }

  void record() {
    ProofResult r;
    for (const auto& v : request_vars_) {
      Term t = resolve(Term::var(v));
      if (!(t.is_var() && t.name() == v)) r.binding.set_raw(v, map_discharge(t, back_));
    }
    std::vector<std::string> keys;
    for (const AssumptionInstance& a : assumed_) {
      AssumptionInstance x = a;
      x.goal = map_discharge(resolve(a.goal), back_);
      for (Formula& c : x.context) c = map_discharge(resolve(c), back_);
      keys.push_back(to_string(x.goal) + "@" + x.justification);
      r.assumptions.push_back(std::move(x));
    }
    std::sort(keys.begin(), keys.end());
    std::ostringstream os;
    os << r.binding << "|";
    for (const auto& k : keys) os << k << ";";
    r.cost = g_real_;
    const std::string key = os.str();
    for (Found& f : found_) {
      if (f.key == key) {
        if (r.cost < f.result.cost) f.result = std::move(r);
        return;
      }
    }
    found_.push_back({key, std::move(r)});
    if (found_.size() >= cfg_.max_results) stop_ = true;
  }

  // Runs `k` with the state restored afterwards.
  template <class K>
  void branch(K&& k) {
    const std::size_t mark = trail_.size();
    const int gs = g_search_, gr = g_real_;
    const std::size_t na = assumed_.size();
    const int co = counted_open_;
    k();
    undo(mark);
    g_search_ = gs;
    g_real_ = gr;
    assumed_.resize(na);
    counted_open_ = co;
  }

  // --- search -------------------------------------------------------------

  void solve(const GoalList& list) {
    if (stop_) return;
    if (++stats_.expansions > cfg_.max_steps) {
      stop_ = true;
      cut_ = true;
      steps_exceeded_ = true;
      return;
    }
    if (!list) {
      record();
      return;
    }
    if (g_search_ + list->hsum > limit_) {
      cut_ = true;
      return;
    }
    // Pick the first goal that need not wait, stopping at a marker.
    std::vector<const GoalNode*> prefix;
    const GoalNode* chosen = list.get();
    bool all_wait = true;
    for (const GoalNode* n = list.get(); n; n = n->next.get()) {
      if (n->g.kind == Goal::Marker) break;
      if (!delayable(n->g)) {
        chosen = n;
        all_wait = false;
        break;
      }
      prefix.push_back(n);
    }
    if (all_wait && prefix.size() > 1) {
      // Every goal waits: take the first one the context can instantiate.
      for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (matches_context(prefix[i]->g)) {
          chosen = prefix[i];
          prefix.resize(i);
          break;
        }
      }
      if (chosen == list.get()) prefix.clear();
    } else if (all_wait) {
      prefix.clear();
    }
    GoalList rest;
    if (chosen == list.get()) {
      rest = list->next;
    } else {
      rest = chosen->next;
      for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) rest = cons((*it)->g, rest);
    }
    const Goal& g = chosen->g;
    if (g.kind == Goal::Marker) {
      if (assumed_.size() == g.start_assumptions) {
        int cost = g_real_ - g.start_cost;
        if (cost <= cfg_.memo_fraction * limit_) {
          auto it = memo_.find(g.memo_key);
          if (it == memo_.end() || it->second > cost) memo_[g.memo_key] = cost;
        }
      }
      solve(rest);
      return;
    }
    Formula f = resolve(g.f);
    switch (f.kind()) {
      case FormulaKind::True:
        solve(rest);
        return;
      case FormulaKind::False:
      case FormulaKind::Mismatch:
        return;
      case FormulaKind::And: {
        GoalList l = cons(make_goal(f.right(), g.anc, g.ctx, false), rest);
        l = cons(make_goal(f.left(), g.anc, g.ctx, g.restricted), l);
        solve(l);
        return;
      }
      case FormulaKind::Exists: {
        Substitution s;
        for (const auto& v : f.vars()) s.set_raw(v, Term::var(session_.fresh_var(v)));
        Formula body = apply(s, f.body());
        solve(cons(make_goal(body, g.anc, g.ctx, g.restricted), rest));
        return;
      }
      case FormulaKind::Equality:
        solve_eq(g, f, rest);
        return;
      case FormulaKind::Atom:
        solve_atom(g, f, rest);
        return;
      case FormulaKind::Forall:
      case FormulaKind::Impl:
        solve_forall(g, f, rest);
        return;
    }
  }

  void solve_eq(const Goal& g, const Formula& f, const GoalList& rest) {
    bool unified = false;
    branch([&] {
      if (unify(f.lhs(), f.rhs())) {
        unified = true;
        trace(g, "unify", f);
        solve(rest);
      }
    });
    if (unified) return;
    for (const Formula& c : full_context(g.ctx)) {
      if (!c.is_eq()) continue;
      branch([&] {
        if (unify(c.lhs(), f.lhs()) && unify(c.rhs(), f.rhs())) {
          trace(g, "context", f);
          solve(rest);
        }
      });
      branch([&] {
        if (unify(c.lhs(), f.rhs()) && unify(c.rhs(), f.lhs())) {
          trace(g, "context", f);
          solve(rest);
        }
      });
    }
    try_assumables(g, f, "=/2", rest);
  }

  void try_assumables(const Goal& g, const Formula& f, const std::string& key, const GoalList& rest) {
    if (!allow_assumptions) return;
    auto it = th_.assumable_index.find(key);
    if (it == th_.assumable_index.end()) return;
    const std::vector<Formula> ctx = full_context(g.ctx);
    for (int idx : it->second) {
      const AssumableDecl& d = th_.assumables[idx];
      const std::string sfx = fresh_suffix();
      Formula dg = rename(d.goal, sfx);
      Formula dc = rename(d.condition, sfx);
      auto attempt = [&](bool swapped) {
        branch([&] {
          bool ok = swapped ? (unify(dg.lhs(), f.rhs()) && unify(dg.rhs(), f.lhs())) : unify_atoms(dg, f);
          if (!ok) return;
          if (!dc.is_true()) {
            bool matched = false;
            for (const Formula& c : ctx) {
              const std::size_t m = trail_.size();
              if (unify_atoms(dc, c)) {
                matched = true;
                break;
              }
              undo(m);
            }
            if (!matched) return;
          }
          Formula rg = resolve(f);
          bool dup = false;
          for (const AssumptionInstance& a : assumed_)
            if (resolve(a.goal) == rg && a.justification == d.justification) dup = true;
          if (!dup) {
            assumed_.push_back(AssumptionInstance{rg, d.cost, d.justification, d.kind, ctx});
            g_search_ += d.cost;
            g_real_ += d.cost;
            if (g_search_ + (rest ? rest->hsum : 0) > limit_) {
              cut_ = true;
              return;
            }
          }
          trace(g, "assume", f);
          solve(rest);
        });
      };
      attempt(false);
      if (f.is_eq()) attempt(true);
    }
  }

  bool quick_test_holds(const QuickTest& q, const Formula& goal) {
    for (std::size_t i = 0; i < q.binding.size(); ++i) {
      const Term arg = resolve(goal.args()[i]);
      const BindingCondition& c = q.binding[i];
      if (c.kind == BindingCondition::Ground && !arg.ground()) return false;
      if (c.kind == BindingCondition::Equals) {
        auto s = aet::unify(arg, c.term);
        if (!s) return false;
      }
    }
    return true;
  }

  void solve_atom(const Goal& g, const Formula& f, const GoalList& rest) {
    int penalty = 0;
    for (AncPtr a = g.anc; a; a = a->next) {
      Formula ra = resolve(a->goal);
      if (ra == f) {
        ++stats_.identity_cuts;
        return;
      }
      if (!penalty && subsumes(ra, f)) penalty = 1;
    }
    if (penalty) ++stats_.penalties;
    const std::string key = f.key();
    const bool ground = std::all_of(f.args().begin(), f.args().end(), [](const Term& t) { return t.ground(); });
    const std::string memo_key = ground ? to_string(f) : std::string();
    auto memo_hit = [&]() -> const int* {
      if (!ground) return nullptr;
      auto it = memo_.find(memo_key);
      return it == memo_.end() ? nullptr : &it->second;
    };
    if (const int* c = memo_hit()) {
      ++stats_.memo_hits;
      branch([&] {
        g_search_ += *c;
        g_real_ += *c;
        trace(g, "memo", f);
        solve(rest);
      });
      return;
    }

    // Context lookup.
    for (CtxPtr c = g.ctx; c; c = c->next) {
      if (!c->f.is_atom() || c->f.key() != key) continue;
      branch([&] {
        if (unify_atoms(c->f, f)) {
          trace(g, "context", f);
          solve(rest);
        }
      });
    }
    for (const Formula& c : context_) {
      if (!c.is_atom() || c.key() != key) continue;
      branch([&] {
        if (unify_atoms(c, f)) {
          trace(g, "context", f);
          solve(rest);
        }
      });
    }
    if (stop_) return;

    if (!g.restricted) {
      // Stored tuples and cached unit clauses.
      const RelationDecl* rd = store_.decl(f.pred());
      if (rd && rd->arity == f.arity()) {
        for (const Tuple& t : store_.tuples(f.pred())) {
          branch([&] {
            if (unify_args(f.args(), t)) {
              g_search_ += 1 + penalty;
              g_real_ += 1;
              trace(g, "fact", f);
              solve(rest);
            }
          });
          if (stop_) return;
        }
      }
      for (const Formula& fact : facts_) {
        if (!fact.is_atom() || fact.key() != key) continue;
        branch([&] {
          if (unify_atoms(fact, f)) {
            g_search_ += 1 + penalty;
            g_real_ += 1;
            trace(g, "fact", f);
            solve(rest);
          }
        });
      }
      // Directly evaluable predicates.
      if (is_builtin(f.pred(), f.arity())) {
        BuiltinOutcome o = eval_builtin(f);
        if (o.kind == BuiltinOutcome::Fail) return;
        if (o.kind == BuiltinOutcome::Succeed) {
          branch([&] {
            for (const auto& [v, t] : o.binding.map())
              if (!unify(Term::var(v), t)) return;
            g_search_ += 1 + penalty;
            g_real_ += 1;
            trace(g, "builtin", f);
            solve(rest);
          });
          return;
        }
      }
    }

    // Horn clauses in declaration order.
    for (int idx : th_.clauses_for(key)) {
      if (stop_) return;
      const HornClause& hc = th_.clauses[idx];
      if (g.restricted && hc.origin != ClauseOrigin::Backward) continue;
      if (memo_hit()) break;  // a cheap proof exists already; do not retry
      expand_clause(g, f, hc, penalty, ground, memo_key, rest);
    }

    try_assumables(g, f, key, rest);

    if (open && open->count(key)) {
      const bool is_counted = counted && counted->count(key);
      if (is_counted && counted_open_ >= max_counted) return;
      branch([&] {
        if (is_counted) ++counted_open_;
        int cost = open->at(key);
        assumed_.push_back(AssumptionInstance{f, cost, "open", AssumptionKind::Specialization, {}});
        g_search_ += cost;
        g_real_ += cost;
        trace(g, "open", f);
        solve(rest);
      });
    }
  }

  void expand_clause(const Goal& g, const Formula& f, const HornClause& hc, int penalty, bool ground,
                     const std::string& memo_key, const GoalList& rest) {
    const std::string sfx = fresh_suffix();
    std::vector<Formula> parts = hc.body;
    parts.insert(parts.begin(), hc.head);
    Formula renamed = rename(Formula::conj(parts), sfx);
    std::vector<Formula> items = conjuncts(renamed);
    // conj() drops nothing but TrueF; bodies never contain TrueF.
    Formula head = items.front();
    std::vector<Formula> body(items.begin() + 1, items.end());
    branch([&] {
      if (!unify_atoms(head, f)) return;
      AncPtr anc = push_anc(f, g.anc);
      std::vector<Formula> rb;
      for (const Formula& b : body) {
        Formula r = resolve(b);
        // Look-ahead loop check against the ancestors.
        for (AncPtr a = anc; a; a = a->next)
          if (resolve(a->goal) == r) {
            ++stats_.identity_cuts;
            return;
          }
        rb.push_back(r);
      }
      // Quick failure and determinism tests.
      std::size_t first = rb.size();
      for (std::size_t i = 0; i < rb.size(); ++i) {
        if (!rb[i].is_atom()) continue;
        auto qt = th_.quick_test_index.find(rb[i].key());
        if (qt == th_.quick_test_index.end()) continue;
        for (int qi : qt->second) {
          const QuickTest& q = th_.quick_tests[qi];
          if (!quick_test_holds(q, rb[i])) continue;
          if (q.failure) return;
          if (first == rb.size()) first = i;
        }
      }
      std::vector<std::size_t> order;
      if (first < rb.size()) order.push_back(first);
      for (std::size_t i = 0; i < rb.size(); ++i)
        if (i != first) order.push_back(i);

      GoalList l = rest;
      if (ground) {
        Goal m;
        m.kind = Goal::Marker;
        m.memo_key = memo_key;
        m.start_cost = g_real_;
        m.start_assumptions = assumed_.size();
        l = cons(m, l);
      }
      const bool backward = hc.origin == ClauseOrigin::Backward;
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        bool restricted = backward && *it == 0;
        l = cons(make_goal(rb[*it], anc, g.ctx, restricted), l);
      }
      g_search_ += 1 + penalty;
      g_real_ += 1;
      trace(g, to_string(hc.origin).c_str(), f);
      solve(l);
    });
  }

  bool all_database(const Formula& f) const {
    std::vector<Formula> atoms;
    collect_atoms(f, atoms);
    if (atoms.empty()) return false;
    for (const Formula& a : atoms)
      if (!th_.is_database(a)) return false;
    return true;
  }

  void solve_forall(const Goal& g, const Formula& f, const GoalList& rest) {
    std::vector<std::string> vars;
    Formula impl = f;
    if (f.is_forall()) {
      vars = f.vars();
      impl = f.body();
    }
    if (!impl.is_impl()) throw UnsupportedGoalShape("forall goal without an implication: " + to_string(f));
    const Formula ante = impl.ante(), consq = impl.cons();
    if (cfg_.extensional && all_database(ante) && free_variables(f).empty()) {
      solve_extensional(g, vars, ante, consq, rest);
      return;
    }
    Substitution s;
    for (const auto& v : vars) s.set_raw(v, session_.fresh_discharge(v));
    Formula a = apply(s, ante), c = apply(s, consq);
    CtxPtr ctx = g.ctx;
    for (const Formula& x : conjuncts(a))
      if (x.is_atom() || x.is_eq()) ctx = std::make_shared<const CtxNode>(CtxNode{x, ctx});
    branch([&] {
      trace(g, "intensional", f);
      solve(cons(make_goal(c, g.anc, ctx), rest));
    });
  }

  void solve_extensional(const Goal& g, const std::vector<std::string>& vars, const Formula& ante,
                         const Formula& consq, const GoalList& rest) {
    std::vector<Formula> ctx = full_context(g.ctx);
    SearchConfig sub = cfg_;
    sub.max_results = 100000;
    ProofStats st;
    Engine left(th_, store_, session_, sub, facts_, nullptr, st);
    left.allow_assumptions = allow_assumptions;
    std::vector<ProofResult> cases = left.run(ante, ctx);
    int total = 0;
    std::vector<AssumptionInstance> extra;
    for (const ProofResult& pr : cases) {
      for (const auto& a : pr.assumptions) extra.push_back(a);
      Formula c = apply(pr.binding, consq);
      std::vector<Formula> cctx = ctx;
      for (const Formula& x : conjuncts(apply(pr.binding, ante)))
        if (x.is_atom() || x.is_eq()) cctx.push_back(x);
      ProofStats st2;
      Engine right(th_, store_, session_, cfg_, facts_, nullptr, st2);
      right.allow_assumptions = allow_assumptions;
      std::vector<ProofResult> proofs = right.run(c, cctx);
      if (proofs.empty()) return;
      total += pr.cost + proofs.front().cost;
      for (const auto& a : proofs.front().assumptions) extra.push_back(a);
    }
    (void)vars;
    branch([&] {
      g_search_ += total;
      g_real_ += total;
      for (auto& a : extra) {
        bool dup = false;
        for (const auto& b : assumed_)
          if (b.goal == a.goal && b.justification == a.justification) dup = true;
        if (!dup) assumed_.push_back(a);
      }
      if (g_search_ + (rest ? rest->hsum : 0) > limit_) {
        cut_ = true;
        return;
      }
      trace(g, "extensional", ante);
      solve(rest);
    });
  }
};

}  // namespace

Prover::Prover(const CompiledTheory& theory, const RelStore& store, Session& session, SearchConfig config)
    : theory_(theory), store_(store), session_(session), config_(config) {
  config_.validate();
}

std::vector<ProofResult> Prover::prove(const Formula& goal, const std::vector<Formula>& context,
                                       bool allow_assumptions) {
  Engine e(theory_, store_, session_, config_, facts_, trace_, stats_);
  e.allow_assumptions = allow_assumptions;
  return e.run(goal, context);
}

std::vector<ProofResult> Prover::prove_open(const Formula& goal, const std::vector<Formula>& context,
                                            const std::map<std::string, int>& open,
                                            const std::set<std::string>& counted, int max_counted) {
  Engine e(theory_, store_, session_, config_, facts_, trace_, stats_);
  e.open = &open;
  e.counted = &counted;
  e.max_counted = max_counted;
  return e.run(goal, context);
}

std::vector<ProofResult> prove(const Formula& goal, const std::vector<Formula>& context, const CompiledTheory& theory,
                               const RelStore& store, const SearchConfig& config, bool allow_assumptions,
                               Session* session, TraceSink* trace) {
  Session local;
  Prover p(theory, store, session ? *session : local, config);
  p.set_trace(trace);
  auto out = p.prove(goal, context, allow_assumptions);
  if (out.empty() && p.stats().exhausted)
    throw BudgetExhausted("no proof of " + to_string(goal) + " within cost limit " + std::to_string(config.max_limit));
  return out;
}

std::vector<AssumptionInstance> refute_assumptions(const std::vector<AssumptionInstance>& assumptions,
                                                   const CompiledTheory& theory, const RelStore& store,
                                                   const SearchConfig& config) {
  std::vector<AssumptionInstance> violated;
  Session session;
  for (const AssumptionInstance& a : assumptions) {
    Prover p(theory, store, session, config);
    Formula neg = Formula::atom("neg", {formula_to_term(a.goal)});
    // Free variables of the assumption are frozen like the context.
    std::vector<Formula> ctx = a.context;
    Substitution freeze;
    for (const auto& v : free_variables_ordered(a.goal)) freeze.set_raw(v, session.fresh_discharge(v));
    if (!freeze.empty()) {
      neg = apply(freeze, neg);
      for (Formula& c : ctx) c = apply(freeze, c);
    }
    if (!p.prove(neg, ctx, false).empty()) violated.push_back(a);
  }
  return violated;
}

std::set<std::string> conceptual_predicates(const CompiledTheory& theory) {
  std::set<std::string> out;
  for (const CompiledEquiv& e : theory.equivs) {
    bool db = false;
    for (const Formula& q : e.rhs_conjuncts)
      if (q.is_atom() && theory.is_database(q)) db = true;
    if (!db) continue;
    for (const Formula& l : e.lhs)
      if (!theory.aux_preds.count(l.key()) && !theory.is_declared(l)) out.insert(l.key());
  }
  return out;
}

std::vector<HornClause> derive_lemmas(const CompiledTheory& theory, const RelStore& store, const std::string& target,
                                      int assumption_budget, const SearchConfig& config) {
  auto slash = target.rfind('/');
  if (slash == std::string::npos) throw Error("target must be name/arity: " + target);
  const std::string name = target.substr(0, slash);
  const std::size_t arity = std::stoul(target.substr(slash + 1));
  if (!theory.equiv_index.count(pred_key(name, arity)))
    throw NoEquivalenceForTarget("no equivalence has " + target + " on its left-hand side");

  std::vector<Term> args;
  for (std::size_t i = 0; i < arity; ++i) args.push_back(Term::var("X" + std::to_string(i + 1)));
  Formula goal = Formula::atom(name, args);

  std::set<std::string> conceptual = conceptual_predicates(theory);
  conceptual.erase(pred_key(name, arity));
  std::map<std::string, int> open;
  for (const auto& k : conceptual) open[k] = 1;
  for (const auto& [k, r] : theory.relations)
    if (r.cls == RelationClass::Arithmetic) open[k] = 1;

  Session session;
  SearchConfig cfg = config;
  cfg.max_results = 256;
  Prover p(theory, store, session, cfg);
  std::vector<ProofResult> proofs = p.prove_open(goal, {}, open, conceptual, assumption_budget);

  std::vector<HornClause> out;
  std::set<std::string> seen;
  for (const ProofResult& pr : proofs) {
    std::vector<Formula> body;
    int n_conceptual = 0;
    for (const AssumptionInstance& a : pr.assumptions) {
      body.push_back(a.goal);
      if (conceptual.count(a.goal.key())) ++n_conceptual;
    }
    if (n_conceptual == 0 || n_conceptual > assumption_budget) continue;
    if (n_conceptual == 2) {
      std::vector<std::string> v1, v2;
      std::vector<Formula> cs;
      for (const Formula& b : body)
        if (conceptual.count(b.key())) cs.push_back(b);
      v1 = free_variables_ordered(cs[0]);
      v2 = free_variables_ordered(cs[1]);
      bool share = false;
      for (const auto& v : v1)
        if (std::find(v2.begin(), v2.end(), v) != v2.end()) share = true;
      if (!share) continue;
    }
    HornClause lemma;
    lemma.head = apply(pr.binding, goal);
    lemma.body = body;
    lemma.origin = ClauseOrigin::User;
    std::vector<Formula> all = body;
    all.insert(all.begin(), lemma.head);
    const std::string key = to_string(normalize_vars(Formula::conj(all)));
    if (!seen.insert(key).second) continue;
    // Soundness check: the head follows from the body without assumptions.
    Prover check(theory, store, session, config);
    if (check.prove(lemma.head, lemma.body, false).empty()) continue;
    out.push_back(std::move(lemma));
  }
  return out;
}

}  // namespace aet
