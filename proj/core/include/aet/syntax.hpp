// Lexer, raw expression parser and conversion to terms and formulas.

#ifndef AET_SYNTAX_HPP
#define AET_SYNTAX_HPP

#include <string>
#include <string_view>
#include <vector>

#include "aet/errors.hpp"
#include "aet/formula.hpp"
#include "aet/term.hpp"

namespace aet {

struct Token {
  enum Kind { Ident, Var, Number, Quoted, Qualified, Symbol, Punct, End };
  Kind kind = End;
  std::string text;
  double number = 0;
  Location loc;
  // Set when '(' follows with no intervening whitespace.
  bool call = false;
};

// Operator-precedence expression tree, prior to interpretation.
struct Raw {
  enum Kind { Var, Num, Ident, List, Op, Qualified };
  Kind kind = Ident;
  std::string name;
  double num = 0;
  bool quoted = false;
  std::vector<Raw> args;
  Location loc;
};

class Lexer {
 public:
  Lexer(std::string_view text, std::string file);
  const Token& peek();
  Token next();

 private:
  Token scan();
  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1, col_ = 1;
  std::string file_;
  Token look_;
  bool has_look_ = false;
  void advance(std::size_t n);
};

class Parser {
 public:
  Parser(std::string_view text, std::string file = "<input>");

  Raw expr(int max_prec = 1200);
  const Token& peek() { return lex_.peek(); }
  Token next() { return lex_.next(); }
  bool at(Token::Kind k, std::string_view text = {});
  bool accept(Token::Kind k, std::string_view text);
  Token expect(Token::Kind k, std::string_view text, std::string_view what);
  bool at_end() { return peek().kind == Token::End; }
  [[noreturn]] void fail(std::string expected);

 private:
  Raw primary();
  Lexer lex_;
};

struct ParseOptions {
  // Accept the reserved printed forms sk(N) and c*(N).
  bool allow_reserved = true;
};

Term to_term(const Raw& r, const ParseOptions& opt = {});
Formula to_formula(const Raw& r, const ParseOptions& opt = {});

Term parse_term(std::string_view text, const ParseOptions& opt = {});
// Parses one formula; a trailing '.' is permitted.
Formula parse_formula(std::string_view text, const ParseOptions& opt = {});
Raw parse_raw(std::string_view text);

bool is_comparison(const std::string& op);

}  // namespace aet

#endif  // AET_SYNTAX_HPP
