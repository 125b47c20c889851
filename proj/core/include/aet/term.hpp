// First-order terms of the target reasoning language.

#ifndef AET_TERM_HPP
#define AET_TERM_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace aet {

enum class TermKind : std::uint8_t {
  Variable,
  Constant,
  Number,
  Date,
  Compound,
  Skolem,
  Named,
  Discharge
};

// Immutable, cheaply copyable handle. A default-constructed Term is null and
// only valid as a placeholder.
class Term {
 public:
  Term() = default;

  static Term var(std::string name);
  static Term constant(std::string name);
  static Term number(double value);
  static Term date(int year, int month, int day);
  static Term compound(std::string functor, std::vector<Term> args);
  static Term skolem(int index, std::vector<Term> args = {});
  static Term named(std::string sort, Term id);
  static Term discharge(int index, std::string source_var = {});
  // Lists are compounds with the functor "[]"; the empty list is a constant.
  static Term list(std::vector<Term> items);

  bool null() const { return !n_; }
  TermKind kind() const { return n_->kind; }
  bool is_var() const { return n_->kind == TermKind::Variable; }
  bool is_constant() const { return n_->kind == TermKind::Constant; }
  bool is_number() const { return n_->kind == TermKind::Number; }
  bool is_date() const { return n_->kind == TermKind::Date; }
  bool is_compound() const { return n_->kind == TermKind::Compound; }
  bool is_skolem() const { return n_->kind == TermKind::Skolem; }
  bool is_named() const { return n_->kind == TermKind::Named; }
  bool is_discharge() const { return n_->kind == TermKind::Discharge; }
  bool is_list() const;

  // Variable name, constant name, functor, named-object sort, or the source
  // variable of a discharge constant.
  const std::string& name() const { return n_->name; }
  double value() const { return n_->value; }
  int year() const { return n_->y; }
  int month() const { return n_->m; }
  int day() const { return n_->d; }
  int index() const { return n_->index; }
  const std::vector<Term>& args() const { return n_->args; }
  // Identifier of a named object.
  const Term& id() const { return n_->args[0]; }

  bool ground() const { return n_->ground; }
  std::size_t hash() const { return n_->hash; }
  // Date as yyyymmdd, handy for comparisons.
  long date_key() const { return n_->y * 10000L + n_->m * 100L + n_->d; }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
  friend bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }
  static int compare(const Term& a, const Term& b);

 private:
  struct Node {
    TermKind kind;
    std::string name;
    double value = 0;
    int y = 0, m = 0, d = 0;
    int index = 0;
    std::vector<Term> args;
    bool ground = true;
    std::size_t hash = 0;
  };
  static Term make(Node node);
  std::shared_ptr<const Node> n_;
};

std::ostream& operator<<(std::ostream& os, const Term& t);
std::string to_string(const Term& t);
// Constant spelling, quoted when it would not re-read as a constant.
std::string quote_if_needed(const std::string& s);
// Spelling in functor position, where uppercase names need no quotes.
std::string functor_text(const std::string& s);

// Collects variable names in first-occurrence order without duplicates.
void collect_vars(const Term& t, std::vector<std::string>& out);
bool occurs(const std::string& var, const Term& t);
bool contains_discharge(const Term& t);
bool contains_skolem(const Term& t);

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

}  // namespace aet

template <>
struct std::hash<aet::Term> {
  std::size_t operator()(const aet::Term& t) const { return t.hash(); }
};

#endif  // AET_TERM_HPP
