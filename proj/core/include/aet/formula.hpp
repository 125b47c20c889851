// Formulas of the target reasoning language and structural helpers.

#ifndef AET_FORMULA_HPP
#define AET_FORMULA_HPP

#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "aet/term.hpp"

namespace aet {

enum class FormulaKind : std::uint8_t {
  Atom,
  Equality,
  And,
  Exists,
  Forall,
  Impl,
  True,
  False,
  Mismatch
};

class Formula {
 public:
  Formula() = default;

  static Formula atom(std::string pred, std::vector<Term> args = {});
  static Formula eq(Term l, Term r);
  static Formula conj(Formula l, Formula r);
  // Right-nested conjunction; empty list gives TrueF.
  static Formula conj(const std::vector<Formula>& items);
  static Formula exists(std::vector<std::string> vars, Formula body);
  static Formula forall(std::vector<std::string> vars, Formula body);
  static Formula impl(Formula ante, Formula cons);
  static Formula truth();
  static Formula falsity();
  static Formula mismatch(Term l, Term r);

  bool null() const { return !n_; }
  FormulaKind kind() const;
  bool is_atom() const;
  bool is_eq() const;
  bool is_and() const;
  bool is_exists() const;
  bool is_forall() const;
  bool is_impl() const;
  bool is_true() const;
  bool is_false() const;
  bool is_mismatch() const;
  bool is_quant() const { return is_exists() || is_forall(); }

  // Atom predicate.
  const std::string& pred() const;
  std::size_t arity() const;
  // Atom arguments; for Equality and Mismatch the two sides.
  const std::vector<Term>& args() const;
  const Term& lhs() const;
  const Term& rhs() const;
  const std::vector<std::string>& vars() const;
  // And: left/right; quantifiers: body is left; Impl: antecedent/consequent.
  const Formula& left() const;
  const Formula& right() const;
  const Formula& body() const;
  const Formula& ante() const;
  const Formula& cons() const;

  std::string key() const;  // "pred/arity"
  std::size_t hash() const;

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
  friend bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }
  static int compare(const Formula& a, const Formula& b);

 private:
  struct Node;
  static Formula make(Node node);
  std::shared_ptr<const Node> n_;
};

struct Formula::Node {
  FormulaKind kind;
  std::string pred;
  std::vector<Term> args;
  std::vector<std::string> vars;
  Formula l, r;
  std::size_t hash = 0;
};

inline FormulaKind Formula::kind() const { return n_->kind; }
inline bool Formula::is_atom() const { return n_->kind == FormulaKind::Atom; }
inline bool Formula::is_eq() const { return n_->kind == FormulaKind::Equality; }
inline bool Formula::is_and() const { return n_->kind == FormulaKind::And; }
inline bool Formula::is_exists() const { return n_->kind == FormulaKind::Exists; }
inline bool Formula::is_forall() const { return n_->kind == FormulaKind::Forall; }
inline bool Formula::is_impl() const { return n_->kind == FormulaKind::Impl; }
inline bool Formula::is_true() const { return n_->kind == FormulaKind::True; }
inline bool Formula::is_false() const { return n_->kind == FormulaKind::False; }
inline bool Formula::is_mismatch() const { return n_->kind == FormulaKind::Mismatch; }
inline const std::string& Formula::pred() const { return n_->pred; }
inline std::size_t Formula::arity() const { return n_->args.size(); }
inline const std::vector<Term>& Formula::args() const { return n_->args; }
inline const Term& Formula::lhs() const { return n_->args[0]; }
inline const Term& Formula::rhs() const { return n_->args[1]; }
inline const std::vector<std::string>& Formula::vars() const { return n_->vars; }
inline const Formula& Formula::left() const { return n_->l; }
inline const Formula& Formula::right() const { return n_->r; }
inline const Formula& Formula::body() const { return n_->l; }
inline const Formula& Formula::ante() const { return n_->l; }
inline const Formula& Formula::cons() const { return n_->r; }
inline std::size_t Formula::hash() const { return n_->hash; }

std::ostream& operator<<(std::ostream& os, const Formula& f);
std::string to_string(const Formula& f);
// Multi-line rendering with two-space indentation.
std::string pretty(const Formula& f);

// Flattens nested And into a conjunct list (TrueF contributes nothing).
std::vector<Formula> conjuncts(const Formula& f);

std::set<std::string> free_variables(const Formula& f);
// Free variables in first-occurrence order.
std::vector<std::string> free_variables_ordered(const Formula& f);
// Every variable name occurring anywhere, bound or free.
std::set<std::string> all_variables(const Formula& f);
std::vector<std::string> term_vars(const std::vector<Term>& ts);

// Atom with the same predicate and argument terms rendered as a compound,
// used for neg/1 goals.
Term formula_to_term(const Formula& atom);
Formula term_to_atom(const Term& t);

bool contains_discharge(const Formula& f);
bool contains_skolem(const Formula& f);
// All atoms in left-to-right order.
void collect_atoms(const Formula& f, std::vector<Formula>& out);
std::set<std::string> predicates(const Formula& f);

// Alpha-equivalence: bound variables compared positionally.
bool alpha_equal(const Formula& a, const Formula& b);
// Renames every variable, bound and free, to V1, V2, ... in first-occurrence
// order so that goldens can be compared independently of naming.
Formula normalize_vars(const Formula& f);

}  // namespace aet

template <>
struct std::hash<aet::Formula> {
  std::size_t operator()(const aet::Formula& f) const { return f.hash(); }
};

#endif  // AET_FORMULA_HPP
