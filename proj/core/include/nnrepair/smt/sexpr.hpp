#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nnrepair::smt {

/// Minimal S-expression for reading solver responses.
struct SExpr {
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> items;

  bool is_list() const { return !is_atom; }
  std::string to_string() const;
};

/// Parses a sequence of top-level expressions. String literals keep their
/// quotes; `;` comments are skipped. Throws ParseError on unbalanced input.
std::vector<SExpr> parse_sexprs(std::string_view text);

}  // namespace nnrepair::smt
