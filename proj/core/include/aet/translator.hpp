// Abductive equivalential translation of formulas into database-level form.

#ifndef AET_TRANSLATOR_HPP
#define AET_TRANSLATOR_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aet/formula.hpp"
#include "aet/prover.hpp"
#include "aet/session.hpp"
#include "aet/simplifier.hpp"
#include "aet/store.hpp"
#include "aet/theory.hpp"

namespace aet {

struct StepRecord {
  std::vector<int> path;  // child indices from the root of the formula before the step
  int rule = -1;          // CompiledEquiv id
  std::string rule_label;
  Substitution matcher;  // over the renamed rule variables
  std::vector<Formula> context;
  Formula conditions;
  std::vector<AssumptionInstance> assumptions;
  Formula replaced;     // the atom that was rewritten
  Formula replacement;  // what took its place, before simplification
  Formula result;       // formula after the step and simplification
};

struct Translation {
  Formula source;
  Formula target;
  std::vector<AssumptionInstance> assumptions;
  std::vector<StepRecord> steps;

  int assumption_cost() const;
};

struct TranslateConfig {
  SearchConfig search;
  int step_budget = 50;
  std::size_t max_translations = 8;
  // Alternative condition proofs explored per rule application.
  std::size_t proofs_per_rule = 4;
  std::size_t max_states = 2000;
  bool allow_assumptions = true;
  // Unit clauses usable in condition proofs, such as the assertion cache.
  std::vector<Formula> facts;
  SimplifyOptions simplify;
};

// Results ordered by assumption cost, then step count, then rule order.
// Throws NoEffectiveTranslation or StepBudgetExceeded when no result exists.
std::vector<Translation> translate(const Formula& source, const CompiledTheory& theory, const RelStore& store,
                                   const TranslateConfig& config = {}, Session* session = nullptr,
                                   TraceSink* trace = nullptr);

// True when every atom of `f` has a declared relation.
bool is_database_level(const Formula& f, const CompiledTheory& theory);

// Applies the recorded steps to the simplified source.
Formula replay(const Formula& source, const std::vector<StepRecord>& steps, const CompiledTheory& theory,
               const SimplifyOptions& opt = {});

// Formula at a path, and replacement of the subformula there.
Formula subformula(const Formula& f, const std::vector<int>& path);
Formula replace_at(const Formula& f, const std::vector<int>& path, const Formula& with);

// Renames bound variables with a fresh-name suffix back to their base name
// where that name is free for use.
Formula tidy_names(const Formula& f);

// One line per step, numbered, in derivation order.
std::vector<std::string> describe_steps(const Translation& t);

struct EquivalenceVerdict {
  bool equal = true;
  std::string witness;  // valuation and truth values when they differ
};

// Evaluates both formulas over the least Horn model of the theory's user
// clauses and normal readings, the store and the ground instances of the
// assumptions, with quantifiers ranging over the active domain.
// Throws UniverseTooLarge when `universe` has more than six constants.
EquivalenceVerdict check_equivalence(const Formula& source, const Formula& target,
                                     const std::vector<AssumptionInstance>& assumptions, const CompiledTheory& theory,
                                     const RelStore& store, const std::set<Term>& universe);

}  // namespace aet

#endif  // AET_TRANSLATOR_HPP
