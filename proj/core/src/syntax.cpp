#include "aet/syntax.hpp"

#include <cctype>
#include <cstdlib>
#include <map>

namespace aet {

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool symbol_char(char c) { return std::string_view("=<>-#/\\*:+").find(c) != std::string_view::npos; }

struct OpInfo {
  int prec;
};

const std::map<std::string, OpInfo>& infix_ops() {
  static const std::map<std::string, OpInfo> ops = {
      {"<-", {1200}}, {"<->", {1100}}, {"->", {1050}}, {"=", {700}},  {"\\=", {700}},
      {"<", {700}},   {">", {700}},    {"=<", {700}},  {">=", {700}}, {"/", {400}},
      {"#", {200}},
  };
  return ops;
}

}  // namespace

bool is_comparison(const std::string& op) {
  return op == "<" || op == ">" || op == "=<" || op == ">=" || op == "\\=";
}

Lexer::Lexer(std::string_view text, std::string file) : s_(text), file_(std::move(file)) {}

void Lexer::advance(std::size_t n) {
  for (std::size_t k = 0; k < n && i_ < s_.size(); ++k, ++i_) {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
  }
}

const Token& Lexer::peek() {
  if (!has_look_) {
    look_ = scan();
    has_look_ = true;
  }
  return look_;
}

Token Lexer::next() {
  if (has_look_) {
    has_look_ = false;
    return look_;
  }
  return scan();
}

Token Lexer::scan() {
  for (;;) {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) advance(1);
    if (i_ < s_.size() && s_[i_] == '%') {
      while (i_ < s_.size() && s_[i_] != '\n') advance(1);
      continue;
    }
    break;
  }
  Token t;
  t.loc = Location{file_, line_, col_};
  if (i_ >= s_.size()) {
    t.kind = Token::End;
    return t;
  }
  char c = s_[i_];
  std::size_t start = i_;
  auto finish_call = [&] { t.call = i_ < s_.size() && s_[i_] == '('; };

  if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
    std::size_t j = i_;
    while (j < s_.size() && ident_char(s_[j])) ++j;
    bool upper = std::isupper(static_cast<unsigned char>(c)) || c == '_';
    // Comparison suffix on names such as sql_date_=<.
    if (s_[j - 1] == '_' && j < s_.size() && (s_[j] == '=' || s_[j] == '<' || s_[j] == '>')) {
      while (j < s_.size() && (s_[j] == '=' || s_[j] == '<' || s_[j] == '>')) ++j;
    }
    while (upper && j < s_.size() && s_[j] == '\'') ++j;
    t.text = std::string(s_.substr(i_, j - i_));
    advance(j - i_);
    if (t.text == "c" && i_ < s_.size() && s_[i_] == '*') {
      t.text = "c*";
      advance(1);
      t.kind = Token::Ident;
      finish_call();
      return t;
    }
    // Column reference alias.column.
    if (!upper && i_ + 1 < s_.size() && s_[i_] == '.' && std::isalpha(static_cast<unsigned char>(s_[i_ + 1]))) {
      std::size_t k = i_ + 1;
      while (k < s_.size() && ident_char(s_[k])) ++k;
      t.text += std::string(s_.substr(i_, k - i_));
      advance(k - i_);
      t.kind = Token::Qualified;
      return t;
    }
    finish_call();
    t.kind = upper && !t.call ? Token::Var : Token::Ident;
    return t;
  }
  if (std::isdigit(static_cast<unsigned char>(c))) {
    std::size_t j = i_;
    while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
    if (j + 1 < s_.size() && s_[j] == '.' && std::isdigit(static_cast<unsigned char>(s_[j + 1]))) {
      ++j;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
    }
    t.text = std::string(s_.substr(i_, j - i_));
    t.number = std::strtod(t.text.c_str(), nullptr);
    t.kind = Token::Number;
    advance(j - i_);
    return t;
  }
  if (c == '\'') {
    std::string out;
    std::size_t j = i_ + 1;
    for (;;) {
      if (j >= s_.size()) throw SyntaxError(t.loc, "closing quote");
      if (s_[j] == '\'') {
        if (j + 1 < s_.size() && s_[j + 1] == '\'') {
          out += '\'';
          j += 2;
          continue;
        }
        ++j;
        break;
      }
      out += s_[j++];
    }
    advance(j - i_);
    t.text = out;
    t.kind = Token::Quoted;
    finish_call();
    return t;
  }
  if (std::string_view("()[],|").find(c) != std::string_view::npos) {
    t.text = std::string(1, c);
    t.kind = Token::Punct;
    advance(1);
    return t;
  }
  if (c == '.') {
    t.text = ".";
    t.kind = Token::Punct;
    advance(1);
    return t;
  }
  if (symbol_char(c)) {
    std::size_t j = i_;
    while (j < s_.size() && symbol_char(s_[j])) ++j;
    // Longest operator prefix that is known; otherwise the whole run.
    std::string run(s_.substr(i_, j - i_));
    std::string best;
    for (std::size_t len = run.size(); len > 0; --len) {
      std::string cand = run.substr(0, len);
      if (infix_ops().count(cand) || cand == "-") {
        best = cand;
        break;
      }
    }
    if (best.empty()) best = run;
    t.text = best;
    t.kind = Token::Symbol;
    advance(best.size());
    (void)start;
    return t;
  }
  throw SyntaxError(t.loc, "a token", std::string(1, c));
}

Parser::Parser(std::string_view text, std::string file) : lex_(text, std::move(file)) {}

bool Parser::at(Token::Kind k, std::string_view text) {
  const Token& t = peek();
  return t.kind == k && (text.empty() || t.text == text);
}

bool Parser::accept(Token::Kind k, std::string_view text) {
  if (!at(k, text)) return false;
  next();
  return true;
}

Token Parser::expect(Token::Kind k, std::string_view text, std::string_view what) {
  if (!at(k, text)) fail(std::string(what));
  return next();
}

void Parser::fail(std::string expected) {
  const Token& t = peek();
  throw SyntaxError(t.loc, std::move(expected), t.kind == Token::End ? "end of input" : t.text);
}

Raw Parser::primary() {
  Token t = next();
  Raw r;
  r.loc = t.loc;
  switch (t.kind) {
    case Token::Var:
      r.kind = Raw::Var;
      r.name = t.text;
      return r;
    case Token::Number:
      r.kind = Raw::Num;
      r.num = t.number;
      return r;
    case Token::Qualified: {
      r.kind = Raw::Qualified;
      r.name = t.text;
      return r;
    }
    case Token::Symbol:
      if (t.text == "-" && at(Token::Number)) {
        Token n = next();
        r.kind = Raw::Num;
        r.num = -n.number;
        return r;
      }
      throw SyntaxError(t.loc, "a term", t.text);
    case Token::Ident:
    case Token::Quoted:
      r.kind = Raw::Ident;
      r.name = t.text;
      r.quoted = t.kind == Token::Quoted;
      if (t.call) {
        next();  // (
        if (!at(Token::Punct, ")")) {
          for (;;) {
            r.args.push_back(expr(999));
            if (accept(Token::Punct, ",")) continue;
            break;
          }
        }
        expect(Token::Punct, ")", "',' or ')'");
        if (r.args.empty()) throw SyntaxError(t.loc, "an argument", ")");
      }
      return r;
    case Token::Punct:
      if (t.text == "(") {
        Raw inner = expr(1200);
        expect(Token::Punct, ")", "')'");
        return inner;
      }
      if (t.text == "[") {
        r.kind = Raw::List;
        if (!at(Token::Punct, "]")) {
          for (;;) {
            r.args.push_back(expr(999));
            if (accept(Token::Punct, ",")) continue;
            break;
          }
        }
        expect(Token::Punct, "]", "',' or ']'");
        return r;
      }
      throw SyntaxError(t.loc, "a term", t.text);
    case Token::End:
      throw SyntaxError(t.loc, "a term", "end of input");
  }
  throw SyntaxError(t.loc, "a term");
}

Raw Parser::expr(int max_prec) {
  Raw left = primary();
  int left_prec = 0;
  for (;;) {
    const Token& t = peek();
    if (t.kind != Token::Symbol) break;
    auto it = infix_ops().find(t.text);
    if (it == infix_ops().end()) break;
    int p = it->second.prec;
    if (p > max_prec || p <= left_prec) break;
    Token op = next();
    Raw right = expr(p - 1);
    Raw node;
    node.kind = Raw::Op;
    node.name = op.text;
    node.loc = op.loc;
    node.args = {std::move(left), std::move(right)};
    left = std::move(node);
    left_prec = p;
  }
  return left;
}

namespace {

[[noreturn]] void bad(const Raw& r, const std::string& expected) {
  throw SyntaxError(r.loc, expected, r.name);
}

int as_int(const Raw& r) {
  if (r.kind != Raw::Num) bad(r, "an integer");
  return static_cast<int>(r.num);
}

}  // namespace

Term to_term(const Raw& r, const ParseOptions& opt) {
  switch (r.kind) {
    case Raw::Var:
      return Term::var(r.name);
    case Raw::Num:
      return Term::number(r.num);
    case Raw::Qualified: {
      auto p = r.name.find('.');
      return Term::compound(".", {Term::constant(r.name.substr(0, p)), Term::constant(r.name.substr(p + 1))});
    }
    case Raw::List: {
      std::vector<Term> items;
      for (const Raw& a : r.args) items.push_back(to_term(a, opt));
      return Term::list(std::move(items));
    }
    case Raw::Op: {
      if (r.name == "#") {
        const Raw& sort = r.args[0];
        if (sort.kind != Raw::Ident || !sort.args.empty()) bad(sort, "a sort name");
        return Term::named(sort.name, to_term(r.args[1], opt));
      }
      return Term::compound(r.name, {to_term(r.args[0], opt), to_term(r.args[1], opt)});
    }
    case Raw::Ident:
      break;
  }
  if (r.args.empty()) return Term::constant(r.name);
  if (!r.quoted) {
    if (r.name == "date" && r.args.size() == 1 && r.args[0].kind == Raw::List && r.args[0].args.size() == 3)
      return Term::date(as_int(r.args[0].args[0]), as_int(r.args[0].args[1]), as_int(r.args[0].args[2]));
    if (r.name == "obj" && r.args.size() == 2 && r.args[0].kind == Raw::Ident && r.args[0].args.empty())
      return Term::named(r.args[0].name, to_term(r.args[1], opt));
    if (r.name == "sk" && (r.args.size() == 1 || r.args.size() == 2) && r.args[0].kind == Raw::Num) {
      if (!opt.allow_reserved) throw SyntaxError(r.loc, "a non-reserved term", "sk(N)");
      std::vector<Term> args;
      if (r.args.size() == 2) {
        if (r.args[1].kind != Raw::List) bad(r.args[1], "a list of Skolem arguments");
        for (const Raw& a : r.args[1].args) args.push_back(to_term(a, opt));
      }
      return Term::skolem(as_int(r.args[0]), std::move(args));
    }
    if (r.name == "c*") {
      if (!opt.allow_reserved) throw SyntaxError(r.loc, "a non-reserved term", "c*(N)");
      if (r.args.size() != 1) bad(r, "c*(N)");
      return Term::discharge(as_int(r.args[0]));
    }
  }
  std::vector<Term> args;
  for (const Raw& a : r.args) args.push_back(to_term(a, opt));
  return Term::compound(r.name, std::move(args));
}

namespace {

std::vector<std::string> var_list(const Raw& r) {
  if (r.kind != Raw::List) bad(r, "a variable list");
  std::vector<std::string> out;
  for (const Raw& a : r.args) {
    if (a.kind != Raw::Var) bad(a, "a variable");
    for (const auto& o : out)
      if (o == a.name) bad(a, "distinct quantified variables");
    out.push_back(a.name);
  }
  if (out.empty()) bad(r, "a non-empty variable list");
  return out;
}

}  // namespace

Formula to_formula(const Raw& r, const ParseOptions& opt) {
  if (r.kind == Raw::Op) {
    if (r.name == "=") return Formula::eq(to_term(r.args[0], opt), to_term(r.args[1], opt));
    if (is_comparison(r.name)) return Formula::atom(r.name, {to_term(r.args[0], opt), to_term(r.args[1], opt)});
    bad(r, "a formula");
  }
  if (r.kind != Raw::Ident) bad(r, "a formula");
  const std::string& n = r.name;
  const std::size_t k = r.args.size();
  if (!r.quoted) {
    if (n == "and" && k == 2) return Formula::conj(to_formula(r.args[0], opt), to_formula(r.args[1], opt));
    if (n == "and" && k > 2) {
      std::vector<Formula> items;
      for (const Raw& a : r.args) items.push_back(to_formula(a, opt));
      return Formula::conj(items);
    }
    if ((n == "exists" || n == "x") && k == 2) return Formula::exists(var_list(r.args[0]), to_formula(r.args[1], opt));
    if (n == "forall" && k == 2) return Formula::forall(var_list(r.args[0]), to_formula(r.args[1], opt));
    if (n == "impl" && k == 2) return Formula::impl(to_formula(r.args[0], opt), to_formula(r.args[1], opt));
    if (n == "true" && k == 0) return Formula::truth();
    if (n == "false" && k == 0) return Formula::falsity();
    if (n == "mismatch" && k == 2) return Formula::mismatch(to_term(r.args[0], opt), to_term(r.args[1], opt));
  }
  std::vector<Term> args;
  for (const Raw& a : r.args) args.push_back(to_term(a, opt));
  return Formula::atom(n, std::move(args));
}

Raw parse_raw(std::string_view text) {
  Parser p(text);
  Raw r = p.expr(1200);
  p.accept(Token::Punct, ".");
  if (!p.at_end()) p.fail("end of input");
  return r;
}

Term parse_term(std::string_view text, const ParseOptions& opt) { return to_term(parse_raw(text), opt); }

Formula parse_formula(std::string_view text, const ParseOptions& opt) { return to_formula(parse_raw(text), opt); }

}  // namespace aet
