// Question answering, commands, meta-questions and assertions over one theory and store.

#ifndef AET_INTERFACE_HPP
#define AET_INTERFACE_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aet/formula.hpp"
#include "aet/prover.hpp"
#include "aet/simplifier.hpp"
#include "aet/sql.hpp"
#include "aet/store.hpp"
#include "aet/theory.hpp"
#include "aet/translator.hpp"

namespace aet {

enum class Verdict {
  Yes,
  No,
  DontKnow,
  DoneComplete,
  DoneQualified,
  Impossible,  // the command cannot be carried out
  CannotComply,
  Know,
  DontKnowBecause,
  Stored  // assertion accepted
};

std::string to_string(Verdict v);

// What the verdict depends on once translation and execution are done.
struct VerdictInputs {
  bool translated = false;   // an effective translation exists
  bool violated = false;     // one of its assumptions is refuted
  bool assumptions = false;  // it depends on assumptions
  bool qualifying = false;   // some assumption is a limitation or approximation
  bool holds = false;        // the target evaluated to true
};

struct VerdictOutcome {
  Verdict verdict;
  bool conditional;
};

VerdictOutcome yn_verdict(const VerdictInputs& in);
VerdictOutcome command_verdict(const VerdictInputs& in);

struct Answer {
  int ordinal = 0;
  Verdict verdict = Verdict::DontKnow;
  bool conditional = false;  // depends on the listed assumptions
  std::vector<DisplayAction> rows;
  std::vector<AssumptionInstance> assumptions;  // grouped by kind
  std::optional<AssumptionInstance> because;    // offending assumption, if any
  std::string diagnostics;
  std::optional<Translation> translation;
  Formula evaluated;  // executed form, with SelectGoals
  std::vector<std::string> sql;
  std::vector<Formula> stored;  // tuples added by an assertion
  std::size_t merges = 0;
};

struct SessionConfig {
  TranslateConfig translate;
  ExecConfig exec;
  // Recorded for reproducibility; every algorithm here is deterministic.
  unsigned seed = 0;
};

class QuerySession {
 public:
  QuerySession(CompiledTheory theory, RelStore store, SessionConfig config = {});

  Answer answer_yn(const Formula& f);
  Answer answer_command(const Formula& f);
  Answer answer_meta(const Formula& embedded);
  // Translates, merges with the assertion cache and stores what graduates.
  // Throws PresuppositionFailure.
  Answer assert_formula(const Formula& f);
  // Assumption lines of the most recent answer.
  std::vector<std::string> explain() const;
  std::vector<HornClause> lemmas(const std::string& target);

  const std::vector<Answer>& history() const { return history_; }
  const CompiledTheory& theory() const { return theory_; }
  const RelStore& store() const { return store_; }
  const AssertionCache& cache() const { return cache_; }
  const SessionConfig& config() const { return config_; }
  Session& names() { return names_; }

 private:
  struct Chosen {
    std::optional<Translation> translation;
    Formula plan;
    std::vector<AssumptionInstance> violated;
    std::string diagnostics;
  };
  Chosen choose(const Formula& f);
  Answer record(Answer a);
  Outcome run(const Formula& plan, Answer& a);

  CompiledTheory theory_;
  RelStore store_;
  SessionConfig config_;
  Session names_;
  AssertionCache cache_;
  std::vector<Answer> history_;
};

// Command form of a WH-question: every instance of the body is displayed at
// some future time.
Formula wh_command(const std::vector<std::string>& vars, const Formula& body);
// Reads lambda([X..], F) as a WH-question command, anything else as a formula.
Formula parse_request(const std::string& text);

struct FormatOptions {
  bool sql = false;
  bool trace = false;
};

std::vector<std::string> format_answer(const Answer& a, const FormatOptions& opt = {});

// Reads commands until quit or end of input: ask F. cmd F. meta F. assert F.
// sql F. explain. lemmas p/n. quit.
void run_repl(QuerySession& session, std::istream& in, std::ostream& out, const FormatOptions& opt = {});
// Executes one REPL line, returning false on quit.
bool repl_line(QuerySession& session, const std::string& line, std::ostream& out, const FormatOptions& opt = {});

}  // namespace aet

#endif  // AET_INTERFACE_HPP
