#include "aet/store.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace aet {

RelStore::RelStore(const CompiledTheory& theory) {
  for (const auto& [key, decl] : theory.relations)
    if (decl.cls == RelationClass::Database) declare(decl);
}

void RelStore::declare(const RelationDecl& decl) {
  auto it = schema_.find(decl.name);
  if (it != schema_.end()) {
    if (it->second.arity != decl.arity)
      throw ArityMismatch("relation " + decl.name + " redeclared with arity " + std::to_string(decl.arity));
    return;
  }
  schema_[decl.name] = decl;
  rows_[decl.name];
  index_[decl.name];
}

bool RelStore::add(const std::string& relation, Tuple tuple) {
  auto it = schema_.find(relation);
  if (it == schema_.end()) {
    RelationDecl d;
    d.name = relation;
    d.arity = tuple.size();
    declare(d);
    it = schema_.find(relation);
  }
  if (it->second.arity != tuple.size())
    throw ArityMismatch("tuple of arity " + std::to_string(tuple.size()) + " for relation " + relation + "/" +
                        std::to_string(it->second.arity));
  for (const Term& t : tuple)
    if (!t.ground()) throw Error("non-ground tuple for relation " + relation);
  if (!index_[relation].insert(tuple).second) return false;
  rows_[relation].push_back(std::move(tuple));
  return true;
}

bool RelStore::remove(const std::string& relation, const Tuple& tuple) {
  auto it = index_.find(relation);
  if (it == index_.end() || !it->second.erase(tuple)) return false;
  auto& rows = rows_[relation];
  for (auto r = rows.begin(); r != rows.end(); ++r)
    if (*r == tuple) {
      rows.erase(r);
      break;
    }
  return true;
}

bool RelStore::contains(const std::string& relation, const Tuple& tuple) const {
  auto it = index_.find(relation);
  return it != index_.end() && it->second.count(tuple) != 0;
}

const std::vector<Tuple>& RelStore::tuples(const std::string& relation) const {
  static const std::vector<Tuple> none;
  auto it = rows_.find(relation);
  return it == rows_.end() ? none : it->second;
}

const RelationDecl* RelStore::decl(const std::string& relation) const {
  auto it = schema_.find(relation);
  return it == schema_.end() ? nullptr : &it->second;
}

std::vector<std::string> RelStore::relations() const {
  std::vector<std::string> out;
  for (const auto& [name, decl] : schema_) out.push_back(name);
  return out;
}

std::size_t RelStore::size() const {
  std::size_t n = 0;
  for (const auto& [name, rows] : rows_) n += rows.size();
  return n;
}

std::size_t RelStore::merge(const RelStore& other) {
  std::size_t n = 0;
  for (const auto& [name, decl] : other.schema_) declare(decl);
  for (const auto& [name, rows] : other.rows_)
    for (const Tuple& t : rows)
      if (add(name, t)) ++n;
  return n;
}

Term parse_cell(const std::string& raw) {
  std::string cell = raw;
  while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.pop_back();
  std::size_t b = 0;
  while (b < cell.size() && std::isspace(static_cast<unsigned char>(cell[b]))) ++b;
  cell = cell.substr(b);
  if (!cell.empty()) {
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    bool numeric = end && *end == '\0' && (std::isdigit(static_cast<unsigned char>(cell[0])) || cell[0] == '-');
    if (numeric) return Term::number(v);
  }
  if (cell.size() == 10 && cell[4] == '-' && cell[7] == '-') {
    bool ok = true;
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
      if (!std::isdigit(static_cast<unsigned char>(cell[i]))) ok = false;
    if (ok) return Term::date(std::stoi(cell.substr(0, 4)), std::stoi(cell.substr(5, 2)), std::stoi(cell.substr(8, 2)));
  }
  return Term::constant(cell);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || std::isspace(static_cast<unsigned char>(s.back())))) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  return s.substr(b);
}

}  // namespace

RelStore load_csv_text(const std::string& text, const RelationDecl& decl, const std::string& path) {
  RelStore delta;
  delta.declare(decl);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (header) {
      std::vector<std::string> names;
      for (auto& c : cells) names.push_back(trim(c));
      if (names != decl.columns) {
        std::string want, got;
        for (const auto& c : decl.columns) want += (want.empty() ? "" : ",") + c;
        for (const auto& c : names) got += (got.empty() ? "" : ",") + c;
        throw HeaderMismatch(path + ": header '" + got + "' does not match declared columns '" + want + "' of " +
                             decl.name);
      }
      header = false;
      continue;
    }
    if (cells.size() != decl.arity) throw RaggedRow(path, lineno);
    Tuple t;
    for (const auto& c : cells) t.push_back(parse_cell(c));
    delta.add(decl.name, std::move(t));
  }
  if (header) throw HeaderMismatch(path + ": missing header row");
  return delta;
}

RelStore load_csv(const std::string& path, const RelationDecl& decl) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_csv_text(ss.str(), decl, path);
}

bool is_builtin(const std::string& pred, std::size_t arity) {
  if (arity != 2) return false;
  return pred == "<" || pred == ">" || pred == "=<" || pred == ">=" || pred == "\\=" || pred == "t_precedes" ||
         pred == "t_before" || pred == "sql_date_=<" || pred == "sql_date_<" || pred == "db_date_convert";
}

namespace {

// -1, 0, 1, or nullopt when the terms are not comparable.
std::optional<int> order(const Term& a, const Term& b) {
  if (a.is_number() && b.is_number()) return a.value() < b.value() ? -1 : a.value() > b.value() ? 1 : 0;
  if (a.is_date() && b.is_date()) return a.date_key() < b.date_key() ? -1 : a.date_key() > b.date_key() ? 1 : 0;
  return std::nullopt;
}

BuiltinOutcome truth(bool b) { return {b ? BuiltinOutcome::Succeed : BuiltinOutcome::Fail, {}}; }

}  // namespace

BuiltinOutcome eval_builtin(const Formula& atom, const Term* now) {
  if (!atom.is_atom() || !is_builtin(atom.pred(), atom.arity())) return {};
  Term a = atom.args()[0], b = atom.args()[1];
  auto subst_now = [&](Term& t) {
    if (t.is_constant() && t.name() == "now" && now) t = *now;
  };
  subst_now(a);
  subst_now(b);
  const std::string& p = atom.pred();
  if (p == "db_date_convert") {
    auto value = [](const Term& t) { return t.is_date() || t.is_number(); };
    if (a.is_var() && value(b)) {
      BuiltinOutcome o{BuiltinOutcome::Succeed, {}};
      o.binding.bind(a.name(), b);
      return o;
    }
    if (b.is_var() && value(a)) {
      BuiltinOutcome o{BuiltinOutcome::Succeed, {}};
      o.binding.bind(b.name(), a);
      return o;
    }
    if (value(a) && value(b)) return truth(a == b);
    return {};
  }
  if (!a.ground() || !b.ground()) return {};
  if (p == "\\=") {
    if (contains_skolem(a) || contains_skolem(b) || contains_discharge(a) || contains_discharge(b)) return {};
    if (a.is_var() || b.is_var()) return {};
    return truth(!(a == b));
  }
  auto o = order(a, b);
  if (!o) return {};
  bool dates = a.is_date();
  if (p == "t_precedes" || p == "sql_date_=<") return dates ? truth(*o <= 0) : BuiltinOutcome{};
  if (p == "t_before" || p == "sql_date_<") return dates ? truth(*o < 0) : BuiltinOutcome{};
  if (p == "<") return truth(*o < 0);
  if (p == ">") return truth(*o > 0);
  if (p == "=<") return truth(*o <= 0);
  if (p == ">=") return truth(*o >= 0);
  return {};
}

}  // namespace aet
