// Substitutions, unification and Skolem form conversion.

#ifndef AET_SUBST_HPP
#define AET_SUBST_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aet/formula.hpp"
#include "aet/term.hpp"

namespace aet {

class Session;

// Kept in solved form: no domain variable occurs in any range term.
class Substitution {
 public:
  Substitution() = default;

  bool empty() const { return m_.empty(); }
  std::size_t size() const { return m_.size(); }
  const std::map<std::string, Term>& map() const { return m_; }
  const Term* find(const std::string& var) const;
  bool contains(const std::string& var) const { return m_.count(var) != 0; }

  // Adds var -> t, applying the binding to existing range terms. Returns
  // false on an occurs-check failure.
  bool bind(const std::string& var, const Term& t);
  // Inserts without normalising; the caller guarantees solved form.
  void set_raw(const std::string& var, const Term& t) { m_[var] = t; }
  void erase(const std::string& var) { m_.erase(var); }
  // Keeps only the given domain variables.
  Substitution restrict(const std::vector<std::string>& vars) const;
  Substitution without(const std::vector<std::string>& vars) const;

  friend bool operator==(const Substitution& a, const Substitution& b) { return a.m_ == b.m_; }

 private:
  std::map<std::string, Term> m_;
};

std::ostream& operator<<(std::ostream& os, const Substitution& s);

Term apply(const Substitution& s, const Term& t);
// Capture-avoiding: bound variables are renamed with trailing primes when a
// range term would otherwise be captured.
Formula apply(const Substitution& s, const Formula& f);
std::vector<Term> apply(const Substitution& s, const std::vector<Term>& ts);

// apply(compose(s1, s2), x) == apply(s2, apply(s1, x)).
Substitution compose(const Substitution& s1, const Substitution& s2);

// Most general unifier extending `s`; occurs check always on.
bool unify(const Term& a, const Term& b, Substitution& s);
std::optional<Substitution> unify(const Term& a, const Term& b);
// Atoms (or equalities/mismatches) unify when predicates and arities agree.
bool unify(const Formula& a, const Formula& b, Substitution& s);
std::optional<Substitution> unify(const Formula& a, const Formula& b);
bool unify_args(const std::vector<Term>& a, const std::vector<Term>& b, Substitution& s);

// One-way matching: binds only variables of `pattern`.
bool match(const Term& pattern, const Term& t, Substitution& s);
bool match(const Formula& pattern, const Formula& f, Substitution& s);
// `general` subsumes `specific` (an instance check, ignoring shared names).
bool subsumes(const Formula& general, const Formula& specific);
// Equal up to consistent variable renaming.
bool variant(const Formula& a, const Formula& b);

// Renames every variable of `f` apart using the session counter.
Formula rename_apart(const Formula& f, Session& session, Substitution* renaming = nullptr);

// Skolem normal form of an And/Exists/Atom/Equality formula, or an Impl whose
// consequent existentials become functions of the antecedent's variables.
// Throws UnsupportedShape otherwise.
std::vector<Formula> skolemize(const Formula& f, Session& session);
// Replaces each distinct zero-argument Skolem constant with a fresh variable
// under one outer existential.
Formula deskolemize(const std::vector<Formula>& clauses);

}  // namespace aet

#endif  // AET_SUBST_HPP
