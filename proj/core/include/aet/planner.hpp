// Reordering of conjunctions so that every goal is finitely evaluable when reached.

#ifndef AET_PLANNER_HPP
#define AET_PLANNER_HPP

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "aet/formula.hpp"
#include "aet/theory.hpp"

namespace aet {

// Variables known to be instantiated at a point of an abstract evaluation.
// Linked variables become instantiated together.
class BindingState {
 public:
  bool bound(const std::string& v) const { return bound_.count(v) != 0; }
  bool instantiated(const Term& t) const;
  void bind(const std::string& v);
  void bind_all(const Term& t);
  void link(const std::string& a, const std::string& b);
  const std::set<std::string>& vars() const { return bound_; }

 private:
  std::set<std::string> bound_;
  std::vector<std::pair<std::string, std::string>> links_;
};

struct FiniteVerdict {
  bool finite = false;
  BindingState after;
};

// Database relations are always finite. Arithmetic relations follow their
// call patterns; without one, comparisons need every argument and other
// relations need all but one. Executable relations follow their call
// patterns, otherwise they need the action (second) argument.
// Throws UndeclaredPredicate.
FiniteVerdict is_potentially_finite(const Formula& atom, const BindingState& state, const CompiledTheory& theory);

// Conjunct permutation under which a left-to-right pass reaches each goal
// with a satisfied call pattern. Throws NoFiniteStrategy with the goals that
// never thawed.
Formula rearrange(const Formula& f, const CompiledTheory& theory);
Formula rearrange(const Formula& f, const CompiledTheory& theory, const BindingState& initial);

// Comparison tests, which bind nothing.
bool is_comparison_pred(const std::string& pred, std::size_t arity);

}  // namespace aet

#endif  // AET_PLANNER_HPP
