// Abductive Horn-clause prover with iterated-deepening A* search.

#ifndef AET_PROVER_HPP
#define AET_PROVER_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aet/formula.hpp"
#include "aet/session.hpp"
#include "aet/store.hpp"
#include "aet/subst.hpp"
#include "aet/theory.hpp"

namespace aet {

struct SearchConfig {
  int initial_limit = 4;
  int increment = 4;
  int max_limit = 40;
  double memo_fraction = 1.0 / 3.0;
  // Prove implications by enumeration when every antecedent atom is a
  // database relation; intensionally otherwise.
  bool extensional = true;
  std::size_t max_results = 32;
  // Goal expansions allowed per call before the search gives up.
  std::size_t max_steps = 400000;

  // Throws Error when the invariants do not hold.
  void validate() const;
};

struct AssumptionInstance {
  Formula goal;
  int cost = 0;
  std::string justification;
  AssumptionKind kind = AssumptionKind::Specialization;
  std::vector<Formula> context;  // context at use

  friend bool operator==(const AssumptionInstance& a, const AssumptionInstance& b);
  friend bool operator<(const AssumptionInstance& a, const AssumptionInstance& b);
};

std::string to_string(const AssumptionInstance& a);

struct ProofResult {
  Substitution binding;  // over the free variables of the goal
  std::vector<AssumptionInstance> assumptions;
  int cost = 0;
};

struct ProofStats {
  int iterations = 0;
  int final_limit = 0;
  std::size_t expansions = 0;
  std::size_t memo_hits = 0;
  std::size_t penalties = 0;
  std::size_t identity_cuts = 0;
  bool exhausted = false;  // the limit cut some branch in the final iteration
};

// One line per rule application: "depth cost kind head".
using TraceSink = std::vector<std::string>;

class Prover {
 public:
  Prover(const CompiledTheory& theory, const RelStore& store, Session& session, SearchConfig config = {});

  // Unit clauses consulted like store tuples (the assertion cache).
  void set_extra_facts(std::vector<Formula> facts) { facts_ = std::move(facts); }
  void set_trace(TraceSink* sink) { trace_ = sink; }
  const SearchConfig& config() const { return config_; }
  SearchConfig& config() { return config_; }

  // Results ordered by cost. Empty when no proof exists within max_limit;
  // stats().exhausted tells whether the limit was the reason.
  std::vector<ProofResult> prove(const Formula& goal, const std::vector<Formula>& context, bool allow_assumptions);
  // As prove, but atoms whose keys are in `open` may be assumed at the given
  // cost; at most `max_counted` of them may have keys in `counted`.
  std::vector<ProofResult> prove_open(const Formula& goal, const std::vector<Formula>& context,
                                      const std::map<std::string, int>& open, const std::set<std::string>& counted,
                                      int max_counted);

  const ProofStats& stats() const { return stats_; }

 private:
  const CompiledTheory& theory_;
  const RelStore& store_;
  Session& session_;
  SearchConfig config_;
  std::vector<Formula> facts_;
  TraceSink* trace_ = nullptr;
  ProofStats stats_;
};

// Spec-level entry point; throws BudgetExhausted when max_limit was reached
// with open branches and no proof was found.
std::vector<ProofResult> prove(const Formula& goal, const std::vector<Formula>& context, const CompiledTheory& theory,
                               const RelStore& store, const SearchConfig& config, bool allow_assumptions,
                               Session* session = nullptr, TraceSink* trace = nullptr);

// Instances whose neg(goal) is provable without assumptions from their
// context at use.
std::vector<AssumptionInstance> refute_assumptions(const std::vector<AssumptionInstance>& assumptions,
                                                   const CompiledTheory& theory, const RelStore& store,
                                                   const SearchConfig& config = {});

// Predicates occurring as LHS conjuncts of equivalences whose right-hand
// sides mention database relations.
std::set<std::string> conceptual_predicates(const CompiledTheory& theory);

// TRL lemmas Conds -> (Goals -> Target) for the target predicate "name/n".
std::vector<HornClause> derive_lemmas(const CompiledTheory& theory, const RelStore& store, const std::string& target,
                                      int assumption_budget = 2, const SearchConfig& config = {});

}  // namespace aet

#endif  // AET_PROVER_HPP
