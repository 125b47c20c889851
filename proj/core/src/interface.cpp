#include "aet/interface.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "aet/errors.hpp"
#include "aet/planner.hpp"
#include "aet/syntax.hpp"

namespace aet {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes:
      return "yes";
    case Verdict::No:
      return "no";
    case Verdict::DontKnow:
      return "dont-know";
    case Verdict::DoneComplete:
      return "done-complete";
    case Verdict::DoneQualified:
      return "done-qualified";
    case Verdict::Impossible:
      return "impossible";
    case Verdict::CannotComply:
      return "cannot-comply";
    case Verdict::Know:
      return "know";
    case Verdict::DontKnowBecause:
      return "dont-know-because";
    case Verdict::Stored:
      return "stored";
  }
  return "?";
}

VerdictOutcome yn_verdict(const VerdictInputs& in) {
  if (!in.translated) return {Verdict::DontKnow, false};
  if (in.violated) return {Verdict::DontKnowBecause, false};
  return {in.holds ? Verdict::Yes : Verdict::No, in.assumptions};
}

VerdictOutcome command_verdict(const VerdictInputs& in) {
  if (!in.translated) return {Verdict::CannotComply, false};
  if (in.violated) return {Verdict::DontKnowBecause, false};
  if (in.holds) return {in.qualifying ? Verdict::DoneQualified : Verdict::DoneComplete, false};
  return {Verdict::Impossible, in.qualifying};
}

namespace {

bool qualifying(const std::vector<AssumptionInstance>& as) {
  return std::any_of(as.begin(), as.end(),
                     [](const AssumptionInstance& a) { return a.kind != AssumptionKind::Specialization; });
}

std::vector<AssumptionInstance> grouped(std::vector<AssumptionInstance> as) {
  std::stable_sort(as.begin(), as.end(), [](const AssumptionInstance& a, const AssumptionInstance& b) {
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  return as;
}

}  // namespace

QuerySession::QuerySession(CompiledTheory theory, RelStore store, SessionConfig config)
    : theory_(std::move(theory)), store_(std::move(store)), config_(std::move(config)) {}

QuerySession::Chosen QuerySession::choose(const Formula& f) {
  Chosen c;
  TranslateConfig tc = config_.translate;
  tc.facts = cache_.clauses;
  std::vector<Translation> ts;
  try {
    ts = translate(f, theory_, store_, tc, &names_);
  } catch (const NoEffectiveTranslation& e) {
    c.diagnostics = e.what();
    return c;
  } catch (const StepBudgetExceeded& e) {
    c.diagnostics = e.what();
    return c;
  }
  std::optional<Chosen> refuted;
  for (const auto& t : ts) {
    Formula plan;
    try {
      plan = rearrange(mismatch_to_false(t.target), theory_);
    } catch (const NoFiniteStrategy& e) {
      if (c.diagnostics.empty()) c.diagnostics = e.what();
      continue;
    }
    auto violated = refute_assumptions(t.assumptions, theory_, store_, config_.translate.search);
    if (!violated.empty()) {
      if (!refuted) refuted = Chosen{t, plan, violated, {}};
      continue;
    }
    return Chosen{t, plan, {}, {}};
  }
  if (refuted) return *refuted;
  return c;
}

Outcome QuerySession::run(const Formula& plan, Answer& a) {
  Formula form = plan;
  try {
    form = rearrange(to_sql(plan, theory_), theory_);
  } catch (const UnconvertibleCondition& e) {
    a.diagnostics = e.what();
  }
  a.evaluated = form;
  for (const auto& g : select_goals(form)) a.sql.push_back(render_sql(g.select));
  return execute(form, store_, theory_, config_.exec);
}

Answer QuerySession::record(Answer a) {
  a.ordinal = static_cast<int>(history_.size()) + 1;
  history_.push_back(a);
  return a;
}

Answer QuerySession::answer_yn(const Formula& f) {
  Answer a;
  Chosen c = choose(f);
  if (!c.translation) {
    a.verdict = Verdict::DontKnow;
    a.diagnostics = c.diagnostics;
    return record(a);
  }
  a.translation = c.translation;
  a.assumptions = grouped(c.translation->assumptions);
  if (!c.violated.empty()) {
    a.verdict = Verdict::DontKnowBecause;
    a.because = c.violated.front();
    return record(a);
  }
  Outcome o = run(c.plan, a);
  auto v = yn_verdict({true, false, !a.assumptions.empty(), qualifying(a.assumptions), o.truth});
  a.verdict = v.verdict;
  a.conditional = v.conditional;
  return record(a);
}

Answer QuerySession::answer_command(const Formula& f) {
  Answer a;
  Chosen c = choose(f);
  if (!c.translation) {
    a.verdict = Verdict::CannotComply;
    a.diagnostics = c.diagnostics;
    return record(a);
  }
  a.translation = c.translation;
  a.assumptions = grouped(c.translation->assumptions);
  if (!c.violated.empty()) {
    a.verdict = Verdict::DontKnowBecause;
    a.because = c.violated.front();
    return record(a);
  }
  Outcome o = run(c.plan, a);
  auto v = command_verdict({true, false, !a.assumptions.empty(), qualifying(a.assumptions), o.truth});
  a.verdict = v.verdict;
  a.conditional = v.conditional;
  if (o.truth) a.rows = o.actions;
  return record(a);
}

Answer QuerySession::answer_meta(const Formula& embedded) {
  Answer a;
  TranslateConfig tc = config_.translate;
  tc.facts = cache_.clauses;
  std::vector<Translation> ts;
  try {
    ts = translate(embedded, theory_, store_, tc, &names_);
  } catch (const Error& e) {
    a.verdict = Verdict::DontKnowBecause;
    a.diagnostics = e.what();
    return record(a);
  }
  std::optional<Translation> first;
  std::optional<AssumptionInstance> offending;
  for (const auto& t : ts) {
    try {
      rearrange(mismatch_to_false(t.target), theory_);
    } catch (const NoFiniteStrategy& e) {
      if (a.diagnostics.empty()) a.diagnostics = e.what();
      continue;
    }
    auto violated = refute_assumptions(t.assumptions, theory_, store_, config_.translate.search);
    if (violated.empty() && !qualifying(t.assumptions)) {
      a.verdict = Verdict::Know;
      a.translation = t;
      a.assumptions = grouped(t.assumptions);
      return record(a);
    }
    if (!first) {
      first = t;
      if (!violated.empty()) {
        offending = violated.front();
      } else {
        for (const auto& x : t.assumptions)
          if (x.kind != AssumptionKind::Specialization) {
            offending = x;
            break;
          }
      }
    }
  }
  a.verdict = Verdict::DontKnowBecause;
  if (first) {
    a.translation = first;
    a.assumptions = grouped(first->assumptions);
    a.because = offending;
  }
  return record(a);
}

Answer QuerySession::assert_formula(const Formula& f) {
  Answer a;
  TranslateConfig tc = config_.translate;
  tc.facts = cache_.clauses;
  std::vector<Translation> ts;
  try {
    ts = translate(f, theory_, store_, tc, &names_);
  } catch (const Error& e) {
    a.verdict = Verdict::DontKnow;
    a.diagnostics = e.what();
    return record(a);
  }
  const Translation& t = ts.front();
  a.translation = t;
  a.assumptions = grouped(t.assumptions);
  if (auto m = find_mismatch(t.target)) throw PresuppositionFailure(m->first, m->second);
  AssertOutcome out = assert_simplify(cache_, t.target, theory_, names_, &store_);
  for (const auto& g : out.graduated) {
    if (store_.add(g.pred(), g.args())) a.stored.push_back(g);
  }
  bool cache_changed = out.cache.clauses != cache_.clauses;
  cache_ = out.cache;
  a.merges = out.merges;
  a.verdict = Verdict::Stored;
  if (a.stored.empty() && !cache_changed) a.diagnostics = "already known";
  return record(a);
}

std::vector<std::string> QuerySession::explain() const {
  std::vector<std::string> out;
  if (history_.empty()) return {"nothing to explain"};
  const Answer& a = history_.back();
  if (a.because)
    out.push_back("violated " + to_string(a.because->kind) + ": " + a.because->justification + " (" +
                  to_string(a.because->goal) + ")");
  for (const auto& x : a.assumptions)
    out.push_back(to_string(x.kind) + ": " + x.justification + " (" + to_string(x.goal) + ")");
  if (out.empty()) out.push_back(a.diagnostics.empty() ? "no assumptions" : a.diagnostics);
  return out;
}

std::vector<HornClause> QuerySession::lemmas(const std::string& target) {
  return derive_lemmas(theory_, store_, target, 2, config_.translate.search);
}

Formula wh_command(const std::vector<std::string>& vars, const Formula& body) {
  std::vector<Term> shown;
  for (const auto& v : vars) shown.push_back(Term::var(v));
  Formula display = Formula::atom("execute", {Term::var("DisplayEv"), Term::compound("display", {Term::list(shown)}),
                                              Term::constant("clare"), Term::var("DisplayT")});
  Formula later = Formula::atom("t_precedes", {Term::constant("now"), Term::var("DisplayT")});
  return Formula::forall(vars, Formula::impl(body, Formula::exists({"DisplayEv", "DisplayT"},
                                                                   Formula::conj(display, later))));
}

Formula parse_request(const std::string& text) {
  Raw r = parse_raw(text);
  if (r.kind == Raw::Ident && r.name == "lambda" && r.args.size() == 2 && r.args[0].kind == Raw::List) {
    std::vector<std::string> vars;
    for (const auto& v : r.args[0].args) {
      if (v.kind != Raw::Var) throw SyntaxError(v.loc, "a variable");
      vars.push_back(v.name);
    }
    return wh_command(vars, to_formula(r.args[1]));
  }
  return to_formula(r);
}

std::vector<std::string> format_answer(const Answer& a, const FormatOptions& opt) {
  std::vector<std::string> out;
  std::string head = to_string(a.verdict);
  if (a.conditional) head += ", conditional on the assumptions";
  std::set<std::string> warned;
  for (const auto& x : a.assumptions)
    if (x.kind != AssumptionKind::Specialization && warned.insert(to_string(x.kind)).second)
      head += " [" + to_string(x.kind) + "]";
  out.push_back(head);
  if (a.because)
    out.push_back("because " + to_string(a.because->kind) + " " + a.because->justification + " is violated or required");
  if (!a.diagnostics.empty()) out.push_back("note: " + a.diagnostics);
  for (const auto& x : a.assumptions) out.push_back("assumption " + to_string(x.kind) + ": " + x.justification);
  if (opt.trace && a.translation)
    for (const auto& l : describe_steps(*a.translation)) out.push_back("step " + l);
  if (opt.sql)
    for (const auto& s : a.sql) out.push_back(s);
  for (const auto& r : a.rows) out.push_back(to_string(r));
  for (const auto& s : a.stored) out.push_back("stored " + to_string(s));
  if (a.merges) out.push_back("merges " + std::to_string(a.merges));
  return out;
}

bool repl_line(QuerySession& session, const std::string& line, std::ostream& out, const FormatOptions& opt) {
  std::string s = line;
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return true;
  s = s.substr(b);
  auto word_end = s.find_first_of(" \t.");
  std::string word = s.substr(0, word_end);
  std::string rest = word_end == std::string::npos ? "" : s.substr(word_end);
  auto print = [&](const Answer& a, FormatOptions o) {
    for (const auto& l : format_answer(a, o)) out << l << "\n";
  };
  try {
    if (word == "quit") return false;
    if (word == "explain") {
      for (const auto& l : session.explain()) out << l << "\n";
    } else if (word == "lemmas") {
      std::string target = rest;
      target.erase(std::remove_if(target.begin(), target.end(), [](char c) { return c == ' ' || c == '\t'; }),
                   target.end());
      if (!target.empty() && target.back() == '.') target.pop_back();
      for (const auto& c : session.lemmas(target)) out << to_string(c) << "\n";
    } else if (word == "ask") {
      print(session.answer_yn(parse_request(rest)), opt);
    } else if (word == "cmd") {
      print(session.answer_command(parse_request(rest)), opt);
    } else if (word == "meta") {
      print(session.answer_meta(parse_request(rest)), opt);
    } else if (word == "assert") {
      print(session.assert_formula(parse_request(rest)), opt);
    } else if (word == "sql") {
      FormatOptions o = opt;
      o.sql = true;
      print(session.answer_command(parse_request(rest)), o);
    } else {
      out << "error: unknown command " << word << "\n";
    }
  } catch (const PresuppositionFailure& e) {
    out << "presupposition failure: " << e.what() << "\n";
  } catch (const Error& e) {
    out << "error: " << e.what() << "\n";
  }
  return true;
}

void run_repl(QuerySession& session, std::istream& in, std::ostream& out, const FormatOptions& opt) {
  std::string line;
  while (std::getline(in, line))
    if (!repl_line(session, line, out, opt)) break;
}

}  // namespace aet
