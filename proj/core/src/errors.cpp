#include "aet/errors.hpp"

#include <sstream>

namespace aet {

std::string Location::str() const {
  std::ostringstream os;
  os << (file.empty() ? "<input>" : file) << ':' << line << ':' << column;
  return os.str();
}

namespace {

std::string syntax_message(const Location& loc, const std::string& expected, const std::string& found) {
  std::string m = loc.str() + ": expected " + expected;
  if (!found.empty()) m += ", found '" + found + "'";
  return m;
}

std::string residue_message(const std::vector<Formula>& residue) {
  std::string m = "no finite evaluation order for:";
  for (const Formula& f : residue) m += " " + to_string(f);
  return m;
}

}  // namespace

SyntaxError::SyntaxError(Location loc, std::string expected, std::string found)
    : Error(syntax_message(loc, expected, found)), loc_(std::move(loc)), expected_(std::move(expected)) {}

PresuppositionFailure::PresuppositionFailure(Term a, Term b)
    : Error("presupposition failure: " + to_string(a) + " is not " + to_string(b)), a_(std::move(a)), b_(std::move(b)) {}

NoFiniteStrategy::NoFiniteStrategy(std::vector<Formula> residue)
    : Error(residue_message(residue)), residue_(std::move(residue)) {}

RaggedRow::RaggedRow(std::string path, int line)
    : Error(path + ":" + std::to_string(line) + ": wrong number of fields"), line_(line) {}

}  // namespace aet
