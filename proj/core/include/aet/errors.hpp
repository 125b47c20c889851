// Error types raised across the library.

#ifndef AET_ERRORS_HPP
#define AET_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "aet/formula.hpp"

namespace aet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Location {
  std::string file;
  int line = 0;
  int column = 0;
  std::string str() const;
};

class SyntaxError : public Error {
 public:
  SyntaxError(Location loc, std::string expected, std::string found = {});
  const Location& location() const { return loc_; }
  const std::string& expected() const { return expected_; }

 private:
  Location loc_;
  std::string expected_;
};

class UnsupportedShape : public Error {
 public:
  using Error::Error;
};

class DuplicateFunctionDecl : public Error {
 public:
  using Error::Error;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

class AuxNameCollision : public Error {
 public:
  using Error::Error;
};

class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

class UnsupportedGoalShape : public Error {
 public:
  using Error::Error;
};

class NoEquivalenceForTarget : public Error {
 public:
  using Error::Error;
};

class NoEffectiveTranslation : public Error {
 public:
  NoEffectiveTranslation(std::string msg, std::vector<Formula> stuck)
      : Error(std::move(msg)), stuck_(std::move(stuck)) {}
  const std::vector<Formula>& stuck() const { return stuck_; }

 private:
  std::vector<Formula> stuck_;
};

class StepBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class UniverseTooLarge : public Error {
 public:
  using Error::Error;
};

class PresuppositionFailure : public Error {
 public:
  PresuppositionFailure(Term a, Term b);
  const Term& left() const { return a_; }
  const Term& right() const { return b_; }

 private:
  Term a_, b_;
};

class NoFiniteStrategy : public Error {
 public:
  NoFiniteStrategy(std::vector<Formula> residue);
  const std::vector<Formula>& residue() const { return residue_; }

 private:
  std::vector<Formula> residue_;
};

class UndeclaredPredicate : public Error {
 public:
  using Error::Error;
};

class UnconvertibleCondition : public Error {
 public:
  using Error::Error;
};

class NonGroundArithmetic : public Error {
 public:
  using Error::Error;
};

class HeaderMismatch : public Error {
 public:
  using Error::Error;
};

class RaggedRow : public Error {
 public:
  RaggedRow(std::string path, int line);
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace aet

#endif  // AET_ERRORS_HPP
