// Linguistic domain theories: declarations, parsing and compilation.

#ifndef AET_THEORY_HPP
#define AET_THEORY_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aet/errors.hpp"
#include "aet/formula.hpp"
#include "aet/session.hpp"

namespace aet {

enum class AssumptionKind { Specialization, Limitation, Approximation };
enum class RelationClass { Database, Arithmetic, Executable };
enum class ClauseOrigin { User, Normal, Backward, FunctionExpansion };

std::string to_string(AssumptionKind k);
std::string to_string(RelationClass c);
std::string to_string(ClauseOrigin o);

struct EquivRule {
  std::vector<std::string> lhs_vars;  // existential variables of the LHS
  std::vector<Formula> lhs;           // atoms
  Formula rhs;
  Formula conds;  // TrueF when unconditional
  int ordinal = 0;
  Location loc;
};

struct HornClause {
  Formula head;
  std::vector<Formula> body;
  ClauseOrigin origin = ClauseOrigin::User;
  int rule = -1;  // compiled equivalence that produced it
  int ordinal = 0;
  Location loc;
};

struct FunctionDecl {
  Formula templ;
  std::vector<std::string> from, to;
  std::vector<std::size_t> from_pos, to_pos;
  int ordinal = 0;
  Location loc;
};

struct AssumableDecl {
  Formula goal;  // Atom or Equality
  int cost = 0;
  std::string justification;
  AssumptionKind kind = AssumptionKind::Specialization;
  Formula condition;
  int ordinal = 0;
  Location loc;
};

struct NegRule {
  Formula goal;
  Formula body;
  int ordinal = 0;
  Location loc;
};

struct CallPattern {
  Formula templ;
  std::set<std::size_t> in, out;  // zero-based argument positions
  int ordinal = 0;
  Location loc;
};

struct BindingCondition {
  enum Kind { Ground, Any, Equals } kind = Any;
  Term term;
};

struct QuickTest {
  bool failure = false;  // quick_fail when true, quick_det otherwise
  Formula goal;
  std::vector<BindingCondition> binding;
  int ordinal = 0;
  Location loc;
};

struct RelationDecl {
  std::string name;
  std::size_t arity = 0;
  std::vector<std::string> columns;
  RelationClass cls = RelationClass::Database;
  Location loc;
};

struct Theory {
  std::vector<EquivRule> equivs;
  std::vector<HornClause> clauses;
  std::vector<FunctionDecl> functions;
  std::vector<AssumableDecl> assumables;
  std::vector<NegRule> negs;
  std::vector<CallPattern> call_patterns;
  std::vector<QuickTest> quick_tests;
  std::vector<RelationDecl> relations;
  int next_ordinal = 0;

  bool empty() const;
};

// Parses one theory file. Declarations are appended to `into` when given, so
// that several files may be combined; duplicates are checked across files.
Theory parse_theory(std::string_view text, const std::string& file = "<theory>");
void parse_theory_into(Theory& into, std::string_view text, const std::string& file = "<theory>");
Theory load_theory_file(const std::string& path);

// Equivalence after splitting of existential left-hand sides.
struct CompiledEquiv {
  int id = 0;
  int source = 0;  // index into Theory::equivs
  std::vector<std::string> lhs_vars;
  std::vector<Formula> lhs;
  Formula rhs;
  std::vector<std::string> rhs_vars;  // existential variables of rhs
  std::vector<Formula> rhs_conjuncts;
  Formula conds;
  std::string aux;  // auxiliary predicate defined or consumed, if any
  std::string label() const;
};

class CompiledTheory {
 public:
  std::vector<CompiledEquiv> equivs;
  // LHS conjunct key -> (equiv id, conjunct index), in declaration order.
  std::map<std::string, std::vector<std::pair<int, int>>> equiv_index;
  std::vector<HornClause> clauses;
  std::map<std::string, std::vector<int>> clause_index;
  std::vector<FunctionDecl> functions;
  std::vector<CompiledEquiv> function_rules;
  std::vector<AssumableDecl> assumables;
  std::map<std::string, std::vector<int>> assumable_index;
  std::vector<NegRule> negs;
  std::vector<CallPattern> call_patterns;
  std::map<std::string, std::vector<int>> call_pattern_index;
  std::vector<QuickTest> quick_tests;
  std::map<std::string, std::vector<int>> quick_test_index;
  std::map<std::string, RelationDecl> relations;  // by key name/arity
  std::set<std::string> aux_preds;                // keys

  const RelationDecl* relation(const std::string& pred, std::size_t arity) const;
  std::optional<RelationClass> relation_class(const Formula& atom) const;
  bool is_database(const Formula& atom) const;
  bool is_arithmetic(const Formula& atom) const;
  bool is_executable(const Formula& atom) const;
  bool is_declared(const Formula& atom) const;
  const std::vector<int>& clauses_for(const std::string& key) const;
  std::vector<const FunctionDecl*> functions_for(const std::string& key) const;
  std::size_t count_clauses(ClauseOrigin origin, int rule) const;
};

// Key used in all indexes.
inline std::string pred_key(const std::string& pred, std::size_t arity) {
  return pred + "/" + std::to_string(arity);
}

CompiledTheory compile(const Theory& theory, Session& session);

std::string to_string(const HornClause& c);

}  // namespace aet

#endif  // AET_THEORY_HPP
