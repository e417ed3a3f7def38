#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nnrepair/smt/term.hpp"

namespace nnrepair::smt {

struct Declaration {
  std::string name;
  Sort sort = Sort::kReal;
};

/// One solver query: options, logic, declarations, assertions, then
/// (check-sat) and an optional (get-value ...).
struct Script {
  std::string logic = "ALL";
  std::vector<std::pair<std::string, std::string>> options;
  std::vector<Declaration> declarations;
  std::vector<Term> assertions;
  std::vector<std::string> get_values;
  /// Emitted as leading "; " lines.
  std::vector<std::string> comments;

  void declare(std::string name, Sort sort = Sort::kReal);
  void assert_term(Term t);
};

/// Deterministic SMT-LIB2 text. Throws EmissionError for undeclared or
/// doubly declared symbols, sort clashes, or get-value on unknown names.
std::string emit(const Script& script);

/// Renders one term (no declaration checks).
std::string to_smt2(const Term& term);

}  // namespace nnrepair::smt
