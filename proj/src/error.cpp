#include "hipp/error.hpp"

namespace hipp {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Infeasible:
      return 2;
    case ErrorKind::Validation:
    case ErrorKind::Domain:
    case ErrorKind::Shape:
    case ErrorKind::Contract:
      return 3;
    case ErrorKind::Numerical:
      return 4;
    default:
      return 1;
  }
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Contract: return "contract";
    case ErrorKind::Assembly: return "assembly";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::Generation: return "generation";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

std::string trim_separators(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == ';')) s.pop_back();
  return s;
}

}  // namespace hipp
