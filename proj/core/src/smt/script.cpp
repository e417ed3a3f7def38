#include "nnrepair/smt/script.hpp"

#include <map>
#include <set>
#include <sstream>

#include "nnrepair/error.hpp"

namespace nnrepair::smt {
namespace {

const char* op_symbol(Kind kind) {
  switch (kind) {
    case Kind::kAdd: return "+";
    case Kind::kNeg: return "-";
    case Kind::kSub: return "-";
    case Kind::kMul: return "*";
    case Kind::kIte: return "ite";
    case Kind::kGt: return ">";
    case Kind::kGe: return ">=";
    case Kind::kEq: return "=";
    case Kind::kLt: return "<";
    case Kind::kLe: return "<=";
    case Kind::kAnd: return "and";
    case Kind::kOr: return "or";
    case Kind::kNot: return "not";
    case Kind::kImplies: return "=>";
    default: return "";
  }
}

const char* sort_name(Sort sort) { return sort == Sort::kReal ? "Real" : "Bool"; }

void write(std::ostream& out, const Term& t) {
  switch (t.kind()) {
    case Kind::kRealConst:
      out << format_smt_real(t.value());
      return;
    case Kind::kBoolConst:
      out << (t.bool_value() ? "true" : "false");
      return;
    case Kind::kVar:
      out << t.name();
      return;
    case Kind::kForall: {
      out << "(forall (";
      bool first = true;
      for (const auto& [name, unused] : t.bindings()) {
        out << (first ? "" : " ") << '(' << name << " Real)";
        first = false;
      }
      out << ") ";
      write(out, t.children()[0]);
      out << ')';
      return;
    }
    case Kind::kLet: {
      out << "(let (";
      bool first = true;
      for (const auto& [name, value] : t.bindings()) {
        out << (first ? "" : " ") << '(' << name << ' ';
        write(out, value);
        out << ')';
        first = false;
      }
      out << ") ";
      write(out, t.children()[0]);
      out << ')';
      return;
    }
    case Kind::kAtLeast: {
      auto kids = t.children();
      out << "(>= ";
      if (kids.size() > 1) {
        out << "(+";
      }
      for (const auto& c : kids) {
        out << (kids.size() > 1 ? " " : "") << "(ite ";
        write(out, c);
        out << " 1.0 0.0)";
      }
      if (kids.size() > 1) {
        out << ')';
      }
      out << ' ' << format_smt_real(Rational(static_cast<unsigned long>(t.threshold()))) << ')';
      return;
    }
    default: {
      out << '(' << op_symbol(t.kind());
      for (const auto& c : t.children()) {
        out << ' ';
        write(out, c);
      }
      out << ')';
      return;
    }
  }
}

// Checks every variable occurrence against declarations and binders.
class ScopeChecker {
 public:
  explicit ScopeChecker(const std::map<std::string, Sort>& declared) : declared_(declared) {}

  void check(const Term& t) {
    switch (t.kind()) {
      case Kind::kVar: {
        for (auto it = bound_.rbegin(); it != bound_.rend(); ++it) {
          if (it->first == t.name()) {
            if (it->second != t.sort()) {
              throw EmissionError("bound symbol '" + t.name() + "' used with the wrong sort");
            }
            return;
          }
        }
        auto found = declared_.find(t.name());
        if (found == declared_.end()) {
          throw EmissionError("undeclared symbol '" + t.name() + "'");
        }
        if (found->second != t.sort()) {
          throw EmissionError("symbol '" + t.name() + "' used with the wrong sort");
        }
        return;
      }
      case Kind::kForall: {
        const std::size_t mark = bound_.size();
        for (const auto& [name, unused] : t.bindings()) {
          bound_.emplace_back(name, Sort::kReal);
        }
        check(t.children()[0]);
        bound_.resize(mark);
        return;
      }
      case Kind::kLet: {
        const auto bindings = t.bindings();
        for (const auto& [name, value] : bindings) {
          check(value);
        }
        const std::size_t mark = bound_.size();
        for (const auto& [name, value] : bindings) {
          bound_.emplace_back(name, value.sort());
        }
        check(t.children()[0]);
        bound_.resize(mark);
        return;
      }
      default:
        for (const auto& c : t.children()) {
          check(c);
        }
    }
  }

 private:
  const std::map<std::string, Sort>& declared_;
  std::vector<std::pair<std::string, Sort>> bound_;
};

}  // namespace

void Script::declare(std::string name, Sort sort) { declarations.push_back({std::move(name), sort}); }

void Script::assert_term(Term t) { assertions.push_back(std::move(t)); }

std::string to_smt2(const Term& term) {
  std::ostringstream out;
  write(out, term);
  return out.str();
}

std::string emit(const Script& script) {
  std::map<std::string, Sort> declared;
  for (const auto& d : script.declarations) {
    if (!declared.emplace(d.name, d.sort).second) {
      throw EmissionError("symbol '" + d.name + "' declared twice");
    }
  }
  ScopeChecker checker(declared);
  for (const auto& a : script.assertions) {
    if (!a.valid() || a.sort() != Sort::kBool) {
      throw EmissionError("assertion is not a Boolean term");
    }
    checker.check(a);
  }
  for (const auto& name : script.get_values) {
    if (!declared.count(name)) {
      throw EmissionError("get-value on undeclared symbol '" + name + "'");
    }
  }

  std::ostringstream out;
  for (const auto& c : script.comments) {
    out << "; " << c << '\n';
  }
  for (const auto& [key, value] : script.options) {
    out << "(set-option :" << key << ' ' << value << ")\n";
  }
  out << "(set-logic " << script.logic << ")\n";
  for (const auto& d : script.declarations) {
    out << "(declare-fun " << d.name << " () " << sort_name(d.sort) << ")\n";
  }
  for (const auto& a : script.assertions) {
    out << "(assert ";
    write(out, a);
    out << ")\n";
  }
  out << "(check-sat)\n";
  if (!script.get_values.empty()) {
    out << "(get-value (";
    for (std::size_t i = 0; i < script.get_values.size(); ++i) {
      out << (i ? " " : "") << script.get_values[i];
    }
    out << "))\n";
  }
  return out.str();
}

}  // namespace nnrepair::smt
