#ifndef PROXUC_ERRORS_HPP
#define PROXUC_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace proxuc {

// Caller passed arguments outside an operation's contract.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A condition the library guarantees internally failed anyway.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

// Iterative solve ran out of budget; carries the best iterate found and the
// certified gap at that iterate so callers can degrade gracefully.
struct SolverError : std::runtime_error {
  std::vector<double> best;
  double gap;
  SolverError(const std::string& what, std::vector<double> best_iterate, double certified_gap)
      : std::runtime_error(what), best(std::move(best_iterate)), gap(certified_gap) {}
};

// Configuration file problem; line <= 0 means "not tied to a line".
struct ConfigError : std::runtime_error {
  int line;
  explicit ConfigError(const std::string& what, int line_no = 0)
      : std::runtime_error(what), line(line_no) {}
};

}  // namespace proxuc

#endif
