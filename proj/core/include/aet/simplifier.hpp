// Non-inferential and inferential simplification, and the assertion cache.

#ifndef AET_SIMPLIFIER_HPP
#define AET_SIMPLIFIER_HPP

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "aet/formula.hpp"
#include "aet/session.hpp"
#include "aet/store.hpp"
#include "aet/theory.hpp"

namespace aet {

struct SimplifyOptions {
  bool merge = true;       // functional merging
  bool redundancy = true;  // drop conjuncts implied by their context
  int redundancy_limit = 6;
  int max_rounds = 64;
};

Formula simplify(const Formula& f, const CompiledTheory& theory, const SimplifyOptions& opt = {});

// Merges atoms that agree on the from-arguments of a function declaration
// and eliminates the resulting equalities. `merges` counts replaced atoms.
Formula functional_merge(const Formula& f, const CompiledTheory& theory, std::size_t* merges = nullptr);

// Individual passes, exposed for tests.
Formula move_quantifiers(const Formula& f);
Formula eliminate_equalities(const Formula& f);
Formula evaluate_ground(const Formula& f, const CompiledTheory& theory);
Formula cleanup(const Formula& f);

// Replaces every Mismatch by FalseF and cleans up.
Formula mismatch_to_false(const Formula& f);
std::optional<std::pair<Term, Term>> find_mismatch(const Formula& f);

struct AssertionCache {
  std::vector<Formula> clauses;  // unit clauses containing Skolem constants
  std::set<int> pending;         // their Skolem indices

  bool empty() const { return clauses.empty(); }
};

struct AssertOutcome {
  AssertionCache cache;
  std::vector<Formula> graduated;  // Skolem-free unit clauses for the store
  std::size_t merges = 0;
};

// Conjoins the de-Skolemized cache with `assertion`, merges, simplifies and
// re-Skolemizes. Store tuples that share a function key with an asserted
// atom take part in the merge when `store` is given. Throws
// PresuppositionFailure when a mismatch results.
AssertOutcome assert_simplify(const AssertionCache& cache, const Formula& assertion, const CompiledTheory& theory,
                              Session& session, const RelStore* store = nullptr);

}  // namespace aet

#endif  // AET_SIMPLIFIER_HPP
