// Batch and interactive front end: aet --theory T.ldt --db R.csv [--ask|--cmd|--meta|--assert EXPR]...

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "aet/errors.hpp"
#include "aet/interface.hpp"
#include "aet/syntax.hpp"

namespace {

using namespace aet;

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// An argument naming a readable file stands for the file's contents.
std::string expression(const std::string& arg) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(arg, ec)) return arg;
  std::ifstream in(arg);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RelStore load_store(const CompiledTheory& theory, const std::vector<std::string>& dbs) {
  RelStore store(theory);
  for (const auto& path : dbs) {
    std::string stem = upper(std::filesystem::path(path).stem().string());
    const RelationDecl* found = nullptr;
    for (const auto& [key, decl] : theory.relations)
      if (decl.cls == RelationClass::Database && upper(decl.name) == stem) found = &decl;
    if (!found) throw Error("no database relation named " + stem + " for " + path);
    store.merge(load_csv(path, *found));
  }
  return store;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abductive translation of logical forms into database queries"};
  std::vector<std::string> theories, dbs;
  int max_cost = -1;
  unsigned seed = 0;
  FormatOptions fmt;
  app.add_option("--theory", theories, "Theory file (repeatable)")->required()->check(CLI::ExistingFile);
  app.add_option("--db", dbs, "CSV file named after a database relation (repeatable)")->check(CLI::ExistingFile);
  auto* ask = app.add_option("--ask", "Yes-no question");
  auto* cmd = app.add_option("--cmd", "Command or lambda([Vars], Body) question");
  auto* meta = app.add_option("--meta", "Embedded question of a meta-question");
  auto* assert_opt = app.add_option("--assert", "Assertion");
  ask->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cmd->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  meta->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  assert_opt->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_flag("--emit-sql", fmt.sql, "Print generated SQL");
  app.add_flag("--emit-trace", fmt.trace, "Print translation steps");
  app.add_option("--max-cost", max_cost, "Search cost limit")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Recorded seed");
  CLI11_PARSE(app, argc, argv);

  std::optional<QuerySession> session;
  try {
    Session names;
    Theory text;
    for (const auto& t : theories) {
      std::ifstream in(t);
      std::stringstream ss;
      ss << in.rdbuf();
      parse_theory_into(text, ss.str(), t);
    }
    CompiledTheory theory = compile(text, names);
    RelStore store = load_store(theory, dbs);
    SessionConfig config;
    config.seed = seed;
    if (max_cost >= 0) config.translate.search.max_limit = max_cost;
    config.translate.search.validate();
    session.emplace(std::move(theory), std::move(store), config);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  std::vector<std::pair<CLI::Option*, std::string>> actions;
  std::map<CLI::Option*, std::size_t> seen;
  for (CLI::Option* o : app.parse_order()) {
    if (o != ask && o != cmd && o != meta && o != assert_opt) continue;
    actions.emplace_back(o, o->results().at(seen[o]++));
  }
  if (actions.empty()) {
    run_repl(*session, std::cin, std::cout, fmt);
    return 0;
  }

  for (const auto& [opt, arg] : actions) {
    Formula f;
    try {
      f = parse_request(expression(arg));
    } catch (const SyntaxError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    Answer a;
    try {
      if (opt == ask) a = session->answer_yn(f);
      else if (opt == cmd) a = session->answer_command(f);
      else if (opt == meta) a = session->answer_meta(f);
      else a = session->assert_formula(f);
    } catch (const PresuppositionFailure& e) {
      std::cout << "presupposition failure: " << e.what() << "\n";
      return 1;
    }
    for (const auto& l : format_answer(a, fmt)) std::cout << l << "\n";
  }
  return 0;
}
