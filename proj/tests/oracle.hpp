// Naive bottom-up fixpoint over store tuples and Horn clauses, used as an
// independent reference by the property suites.

#ifndef AET_TESTS_ORACLE_HPP
#define AET_TESTS_ORACLE_HPP

#include <functional>
#include <set>
#include <vector>

#include "aet/store.hpp"
#include "aet/subst.hpp"
#include "aet/theory.hpp"

namespace aet::testing {

inline std::set<Formula> fixpoint(const std::vector<HornClause>& clauses, const RelStore& store,
                                  std::size_t cap = 100000) {
  std::set<Formula> facts;
  for (const auto& r : store.relations())
    for (const auto& t : store.tuples(r)) facts.insert(Formula::atom(r, t));
  bool changed = true;
  while (changed && facts.size() < cap) {
    changed = false;
    std::vector<Formula> fresh;
    for (const auto& c : clauses) {
      std::function<void(std::size_t, Substitution)> join = [&](std::size_t i, Substitution s) {
        if (i == c.body.size()) {
          Formula h = apply(s, c.head);
          if (free_variables(h).empty() && !facts.count(h)) fresh.push_back(h);
          return;
        }
        Formula g = apply(s, c.body[i]);
        if (g.is_eq()) {
          Substitution t = s;
          if (unify(g.lhs(), g.rhs(), t)) join(i + 1, t);
          return;
        }
        if (g.is_true()) return join(i + 1, s);
        for (const auto& f : facts) {
          if (f.pred() != g.pred() || f.arity() != g.arity()) continue;
          Substitution t = s;
          if (match(g, f, t)) join(i + 1, t);
        }
      };
      join(0, {});
    }
    for (auto& f : fresh) changed = facts.insert(f).second || changed;
  }
  return facts;
}

// User clauses and normal readings: the Skolem-free part of a theory.
inline std::vector<HornClause> forward_clauses(const CompiledTheory& th) {
  std::vector<HornClause> out;
  for (const auto& c : th.clauses)
    if (c.origin == ClauseOrigin::User || c.origin == ClauseOrigin::Normal) out.push_back(c);
  return out;
}

}  // namespace aet::testing

#endif  // AET_TESTS_ORACLE_HPP
