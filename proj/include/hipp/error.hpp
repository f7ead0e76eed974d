#pragma once

#include <stdexcept>
#include <string>

namespace hipp {

enum class ErrorKind {
  Infeasible,   // budget cannot be met
  Validation,   // schema or invariant violation in user input
  Numerical,    // factorization failed after jitter escalation
  Domain,       // argument outside the mathematical domain
  Shape,        // mismatched or empty containers
  Contract,     // precondition of a call not met
  Assembly,     // trajectory pieces do not fit together
  Truncation,   // enumeration cap exceeded
  Generation,   // random instance generation gave up
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Budget infeasibility. `deficit` is how far the cheapest route exceeds the budget.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double shortest, double deficit)
      : Error(ErrorKind::Infeasible, what), shortest_(shortest), deficit_(deficit) {}

  double shortest() const noexcept { return shortest_; }
  double deficit() const noexcept { return deficit_; }

 private:
  double shortest_;
  double deficit_;
};

/// CLI exit code for an error kind: 2 infeasible, 3 validation, 4 numerical, 1 otherwise.
int exit_code(ErrorKind kind) noexcept;

const char* to_string(ErrorKind kind) noexcept;

/// Drops the trailing "; " separators of an accumulated problem list.
std::string trim_separators(std::string s);

}  // namespace hipp
