// Fresh-name counters shared by the modules of one session.

#ifndef AET_SESSION_HPP
#define AET_SESSION_HPP

#include <string>
#include <vector>

#include "aet/term.hpp"

namespace aet {

// Single writer. Counters are monotone for the lifetime of the session.
class Session {
 public:
  Term fresh_skolem(std::vector<Term> args = {}) { return Term::skolem(next_skolem_++, std::move(args)); }
  Term fresh_discharge(const std::string& source) { return Term::discharge(next_discharge_++, source); }
  std::string fresh_var(const std::string& base);

  int skolems_issued() const { return next_skolem_ - 1; }

 private:
  int next_skolem_ = 1;
  int next_discharge_ = 1;
  long next_var_ = 1;
};

}  // namespace aet

#endif  // AET_SESSION_HPP
