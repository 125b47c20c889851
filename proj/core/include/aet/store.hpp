// In-memory relational store, CSV loading and evaluable builtins.

#ifndef AET_STORE_HPP
#define AET_STORE_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aet/formula.hpp"
#include "aet/subst.hpp"
#include "aet/theory.hpp"

namespace aet {

using Tuple = std::vector<Term>;

class RelStore {
 public:
  RelStore() = default;
  explicit RelStore(const CompiledTheory& theory);

  // Registers a relation; re-declaring with the same arity is harmless.
  void declare(const RelationDecl& decl);
  // Returns false when the tuple was already present.
  bool add(const std::string& relation, Tuple tuple);
  bool remove(const std::string& relation, const Tuple& tuple);
  bool contains(const std::string& relation, const Tuple& tuple) const;
  const std::vector<Tuple>& tuples(const std::string& relation) const;
  const RelationDecl* decl(const std::string& relation) const;
  std::vector<std::string> relations() const;
  std::size_t size() const;
  // Adds every tuple of `other`, returning the number of new tuples.
  std::size_t merge(const RelStore& other);

 private:
  std::map<std::string, RelationDecl> schema_;
  std::map<std::string, std::vector<Tuple>> rows_;
  std::map<std::string, std::set<Tuple>> index_;
};

// Parses a cell: number, YYYY-MM-DD date, otherwise a constant.
Term parse_cell(const std::string& cell);
// Reads a CSV fixture whose header must equal the declared column names.
RelStore load_csv(const std::string& path, const RelationDecl& decl);
RelStore load_csv_text(const std::string& text, const RelationDecl& decl, const std::string& path = "<csv>");

struct BuiltinOutcome {
  enum Kind { Fail, Succeed, Unknown };
  Kind kind = Unknown;
  Substitution binding;  // set on Succeed when the builtin instantiates an argument
};

// Predicates evaluated directly: comparisons, date precedence and date
// conversion. Tests the relation name only, not its declaration.
bool is_builtin(const std::string& pred, std::size_t arity);
// `atom` must already carry the current bindings. `now` replaces the constant
// now when given; otherwise now compares as unknown.
BuiltinOutcome eval_builtin(const Formula& atom, const Term* now = nullptr);

}  // namespace aet

#endif  // AET_STORE_HPP
