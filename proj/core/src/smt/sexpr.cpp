#include "nnrepair/smt/sexpr.hpp"

#include <cctype>

#include "nnrepair/error.hpp"

namespace nnrepair::smt {

std::string SExpr::to_string() const {
  if (is_atom) {
    return atom;
  }
  std::string out = "(";
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += (i ? " " : "") + items[i].to_string();
  }
  return out + ")";
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  std::vector<SExpr> top;
  std::vector<SExpr> stack;
  std::size_t line = 1;
  std::size_t i = 0;

  auto emit = [&](SExpr e) {
    if (stack.empty()) {
      top.push_back(std::move(e));
    } else {
      stack.back().items.push_back(std::move(e));
    }
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') {
        ++i;
      }
    } else if (c == '(') {
      SExpr list;
      list.is_atom = false;
      stack.push_back(std::move(list));
      ++i;
    } else if (c == ')') {
      if (stack.empty()) {
        throw ParseError("unbalanced ')'", line);
      }
      SExpr done = std::move(stack.back());
      stack.pop_back();
      emit(std::move(done));
      ++i;
    } else if (c == '"' || c == '|') {
      const char close = c;
      std::size_t j = i + 1;
      while (j < text.size()) {
        if (text[j] == close) {
          // SMT-LIB escapes a quote inside a string by doubling it.
          if (close == '"' && j + 1 < text.size() && text[j + 1] == '"') {
            j += 2;
            continue;
          }
          break;
        }
        if (text[j] == '\n') {
          ++line;
        }
        ++j;
      }
      if (j >= text.size()) {
        throw ParseError("unterminated literal", line);
      }
      emit(SExpr{true, std::string(text.substr(i, j - i + 1)), {}});
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != '(' && text[j] != ')' && text[j] != ';') {
        ++j;
      }
      emit(SExpr{true, std::string(text.substr(i, j - i)), {}});
      i = j;
    }
  }
  if (!stack.empty()) {
    throw ParseError("unbalanced '('", line);
  }
  return top;
}

}  // namespace nnrepair::smt
