#include "aet/term.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "aet/session.hpp"

namespace aet {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

bool plain_lower(const std::string& s) {
  if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

bool plain_upper(const std::string& s) {
  if (s.empty() || !((s[0] >= 'A' && s[0] <= 'Z') || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
  return true;
}

// Predicate names like sql_date_=< carry a comparison suffix after '_'.
bool symbolic_suffix(const std::string& s) {
  auto p = s.find_last_of('_');
  if (p == std::string::npos || p + 1 >= s.size()) return false;
  if (!plain_lower(s.substr(0, p + 1)) && !plain_upper(s.substr(0, p + 1))) return false;
  for (std::size_t i = p + 1; i < s.size(); ++i)
    if (s[i] != '=' && s[i] != '<' && s[i] != '>') return false;
  return true;
}

void print_number(std::ostream& os, double v) {
  if (std::floor(v) == v && std::fabs(v) < 1e15) {
    os << static_cast<long long>(v);
    return;
  }
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  os << std::string(buf, r.ptr);
}

}  // namespace

std::string quote_if_needed(const std::string& s) {
  if (plain_lower(s) || s == "[]" || symbolic_suffix(s)) return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  return out + "'";
}

// Functor position tolerates uppercase names since '(' disambiguates.
std::string functor_text(const std::string& s) {
  if (plain_upper(s) && s.find('\'') == std::string::npos && s != "_") return s;
  return quote_if_needed(s);
}

Term Term::make(Node node) {
  std::size_t h = static_cast<std::size_t>(node.kind) * 1315423911u;
  h = mix(h, std::hash<std::string>{}(node.name));
  switch (node.kind) {
    case TermKind::Variable:
      node.ground = false;
      break;
    case TermKind::Number:
      h = mix(h, std::hash<double>{}(node.value == 0 ? 0.0 : node.value));
      break;
    case TermKind::Date:
      h = mix(h, static_cast<std::size_t>(node.y * 10000L + node.m * 100L + node.d));
      break;
    case TermKind::Discharge:
      // Identity is the index; the source name is informational only.
      h = static_cast<std::size_t>(node.kind) * 1315423911u;
      h = mix(h, static_cast<std::size_t>(node.index));
      break;
    default:
      h = mix(h, static_cast<std::size_t>(node.index));
      break;
  }
  for (const Term& a : node.args) {
    h = mix(h, a.hash());
    if (!a.ground()) node.ground = false;
  }
  node.hash = h;
  Term t;
  t.n_ = std::make_shared<const Node>(std::move(node));
  return t;
}

Term Term::var(std::string name) {
  Node n{TermKind::Variable, std::move(name)};
  return make(std::move(n));
}

Term Term::constant(std::string name) {
  Node n{TermKind::Constant, std::move(name)};
  return make(std::move(n));
}

Term Term::number(double value) {
  Node n{TermKind::Number, {}};
  n.value = value;
  return make(std::move(n));
}

Term Term::date(int year, int month, int day) {
  Node n{TermKind::Date, {}};
  n.y = year;
  n.m = month;
  n.d = day;
  return make(std::move(n));
}

Term Term::compound(std::string functor, std::vector<Term> args) {
  if (args.empty()) return constant(std::move(functor));
  Node n{TermKind::Compound, std::move(functor)};
  n.args = std::move(args);
  return make(std::move(n));
}

Term Term::skolem(int index, std::vector<Term> args) {
  Node n{TermKind::Skolem, {}};
  n.index = index;
  n.args = std::move(args);
  return make(std::move(n));
}

Term Term::named(std::string sort, Term id) {
  Node n{TermKind::Named, std::move(sort)};
  n.args.push_back(std::move(id));
  return make(std::move(n));
}

Term Term::discharge(int index, std::string source_var) {
  Node n{TermKind::Discharge, std::move(source_var)};
  n.index = index;
  return make(std::move(n));
}

Term Term::list(std::vector<Term> items) {
  if (items.empty()) return constant("[]");
  return compound("[]", std::move(items));
}

bool Term::is_list() const {
  return (is_compound() && name() == "[]") || (is_constant() && name() == "[]");
}

int Term::compare(const Term& a, const Term& b) {
  if (a.n_ == b.n_) return 0;
  if (a.null() || b.null()) return a.null() ? (b.null() ? 0 : -1) : 1;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case TermKind::Number:
      if (a.value() != b.value()) return a.value() < b.value() ? -1 : 1;
      return 0;
    case TermKind::Date:
      if (a.date_key() != b.date_key()) return a.date_key() < b.date_key() ? -1 : 1;
      return 0;
    case TermKind::Discharge:
      if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
      return 0;
    default:
      break;
  }
  if (int c = a.name().compare(b.name()); c != 0) return c < 0 ? -1 : 1;
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (a.args().size() != b.args().size()) return a.args().size() < b.args().size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (int c = compare(a.args()[i], b.args()[i]); c != 0) return c;
  return 0;
}

bool operator==(const Term& a, const Term& b) {
  if (a.n_ == b.n_) return true;
  if (a.null() || b.null()) return false;
  if (a.hash() != b.hash()) return false;
  return Term::compare(a, b) == 0;
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
  if (t.null()) return os << "<null>";
  switch (t.kind()) {
    case TermKind::Variable:
      return os << t.name();
    case TermKind::Constant:
      return os << quote_if_needed(t.name());
    case TermKind::Number:
      print_number(os, t.value());
      return os;
    case TermKind::Date:
      return os << "date([" << t.year() << ',' << t.month() << ',' << t.day() << "])";
    case TermKind::Skolem:
      if (t.args().empty()) return os << "sk(" << t.index() << ')';
      os << "sk(" << t.index() << ",[";
      for (std::size_t i = 0; i < t.args().size(); ++i) os << (i ? "," : "") << t.args()[i];
      return os << "])";
    case TermKind::Named:
      return os << quote_if_needed(t.name()) << '#' << t.id();
    case TermKind::Discharge:
      return os << "c*(" << t.index() << ')';
    case TermKind::Compound:
      break;
  }
  if (t.name() == "[]") {
    os << '[';
    for (std::size_t i = 0; i < t.args().size(); ++i) os << (i ? "," : "") << t.args()[i];
    return os << ']';
  }
  if (t.name() == "." && t.args().size() == 2) return os << t.args()[0] << '.' << t.args()[1];
  os << functor_text(t.name()) << '(';
  for (std::size_t i = 0; i < t.args().size(); ++i) os << (i ? "," : "") << t.args()[i];
  return os << ')';
}

std::string to_string(const Term& t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

void collect_vars(const Term& t, std::vector<std::string>& out) {
  if (t.ground()) return;
  if (t.is_var()) {
    for (const auto& v : out)
      if (v == t.name()) return;
    out.push_back(t.name());
    return;
  }
  for (const Term& a : t.args()) collect_vars(a, out);
}

bool occurs(const std::string& var, const Term& t) {
  if (t.ground()) return false;
  if (t.is_var()) return t.name() == var;
  for (const Term& a : t.args())
    if (occurs(var, a)) return true;
  return false;
}

bool contains_discharge(const Term& t) {
  if (t.is_discharge()) return true;
  for (const Term& a : t.args())
    if (contains_discharge(a)) return true;
  return false;
}

bool contains_skolem(const Term& t) {
  if (t.is_skolem()) return true;
  for (const Term& a : t.args())
    if (contains_skolem(a)) return true;
  return false;
}

std::string Session::fresh_var(const std::string& base) {
  std::string b = base;
  while (!b.empty() && b.back() == '\'') b.pop_back();
  if (auto p = b.find("__"); p != std::string::npos && p > 0) b = b.substr(0, p);
  if (b.empty() || !((b[0] >= 'A' && b[0] <= 'Z') || b[0] == '_')) b = "_" + b;
  return b + "__" + std::to_string(next_var_++);
}

}  // namespace aet
