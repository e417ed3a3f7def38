#include "nnrepair/smt/term.hpp"

#include <set>

#include "nnrepair/error.hpp"

namespace nnrepair::smt {
namespace {

Term make(Kind kind, Sort sort, std::vector<Term> children = {}) {
  auto node = std::make_shared<TermNode>();
  node->kind = kind;
  node->sort = sort;
  node->children = std::move(children);
  return Term::from_node(std::move(node));
}

void require(const Term& t, Sort sort, const char* op) {
  if (!t.valid()) {
    throw InvalidInputError(std::string(op) + ": null operand");
  }
  if (t.sort() != sort) {
    throw InvalidInputError(std::string(op) + ": operand has the wrong sort");
  }
}

Term compare(Kind kind, const Term& a, const Term& b, const char* op) {
  require(a, Sort::kReal, op);
  require(b, Sort::kReal, op);
  if (a.is_real_const() && b.is_real_const()) {
    const int c = cmp(a.value(), b.value());
    switch (kind) {
      case Kind::kGt: return boolean(c > 0);
      case Kind::kGe: return boolean(c >= 0);
      case Kind::kEq: return boolean(c == 0);
      case Kind::kLt: return boolean(c < 0);
      case Kind::kLe: return boolean(c <= 0);
      default: break;
    }
  }
  return make(kind, Sort::kBool, {a, b});
}

}  // namespace

Kind Term::kind() const { return node_->kind; }
Sort Term::sort() const { return node_->sort; }
const Rational& Term::value() const { return node_->value; }
bool Term::bool_value() const { return node_->bool_value; }
const std::string& Term::name() const { return node_->name; }
std::span<const Term> Term::children() const { return node_->children; }
std::vector<std::pair<std::string, Term>> Term::bindings() const { return node_->bindings; }
std::size_t Term::threshold() const { return node_->threshold; }

std::size_t Term::tree_size() const {
  std::size_t size = 1;
  for (const auto& c : children()) {
    size += c.tree_size();
  }
  for (const auto& [name, value] : node_->bindings) {
    if (value.valid()) {
      size += value.tree_size();
    }
  }
  return size;
}

Term real(const Rational& value) {
  auto node = std::make_shared<TermNode>();
  node->kind = Kind::kRealConst;
  node->sort = Sort::kReal;
  node->value = value;
  return Term::from_node(std::move(node));
}

Term real(long value) { return real(Rational(value)); }

Term boolean(bool value) {
  auto node = std::make_shared<TermNode>();
  node->kind = Kind::kBoolConst;
  node->sort = Sort::kBool;
  node->bool_value = value;
  return Term::from_node(std::move(node));
}

Term var(std::string name, Sort sort) {
  if (name.empty()) {
    throw InvalidInputError("variable name must not be empty");
  }
  auto node = std::make_shared<TermNode>();
  node->kind = Kind::kVar;
  node->sort = sort;
  node->name = std::move(name);
  return Term::from_node(std::move(node));
}

Term add(std::vector<Term> terms) {
  Rational constant(0);
  std::vector<Term> symbolic;
  for (auto& t : terms) {
    require(t, Sort::kReal, "+");
    if (t.is_real_const()) {
      constant += t.value();
    } else if (t.kind() == Kind::kAdd) {
      for (const auto& c : t.children()) {
        if (c.is_real_const()) {
          constant += c.value();
        } else {
          symbolic.push_back(c);
        }
      }
    } else {
      symbolic.push_back(std::move(t));
    }
  }
  if (symbolic.empty()) {
    return real(constant);
  }
  if (sgn(constant) != 0) {
    symbolic.push_back(real(constant));
  }
  if (symbolic.size() == 1) {
    return symbolic.front();
  }
  return make(Kind::kAdd, Sort::kReal, std::move(symbolic));
}

Term neg(const Term& a) {
  require(a, Sort::kReal, "-");
  if (a.is_real_const()) {
    return real(-a.value());
  }
  if (a.kind() == Kind::kNeg) {
    return a.children()[0];
  }
  return make(Kind::kNeg, Sort::kReal, {a});
}

Term sub(const Term& a, const Term& b) {
  require(a, Sort::kReal, "-");
  require(b, Sort::kReal, "-");
  if (a.is_real_const() && b.is_real_const()) {
    return real(a.value() - b.value());
  }
  if (b.is_real_const() && sgn(b.value()) == 0) {
    return a;
  }
  if (a.is_real_const() && sgn(a.value()) == 0) {
    return neg(b);
  }
  return make(Kind::kSub, Sort::kReal, {a, b});
}

Term mul(const Term& a, const Term& b) {
  require(a, Sort::kReal, "*");
  require(b, Sort::kReal, "*");
  if (a.is_real_const() && b.is_real_const()) {
    return real(a.value() * b.value());
  }
  for (const auto* c : {&a, &b}) {
    if (c->is_real_const() && sgn(c->value()) == 0) {
      return real(0);
    }
  }
  if (a.is_real_const() && a.value() == 1) {
    return b;
  }
  if (b.is_real_const() && b.value() == 1) {
    return a;
  }
  return make(Kind::kMul, Sort::kReal, {a, b});
}

Term ite(const Term& cond, const Term& then_term, const Term& else_term) {
  require(cond, Sort::kBool, "ite");
  if (!then_term.valid() || !else_term.valid() || then_term.sort() != else_term.sort()) {
    throw InvalidInputError("ite: branches must share a sort");
  }
  if (cond.is_bool_const()) {
    return cond.bool_value() ? then_term : else_term;
  }
  return make(Kind::kIte, then_term.sort(), {cond, then_term, else_term});
}

Term gt(const Term& a, const Term& b) { return compare(Kind::kGt, a, b, ">"); }
Term ge(const Term& a, const Term& b) { return compare(Kind::kGe, a, b, ">="); }
Term eq(const Term& a, const Term& b) { return compare(Kind::kEq, a, b, "="); }
Term lt(const Term& a, const Term& b) { return compare(Kind::kLt, a, b, "<"); }
Term le(const Term& a, const Term& b) { return compare(Kind::kLe, a, b, "<="); }

Term land(std::vector<Term> terms) {
  std::vector<Term> kept;
  for (auto& t : terms) {
    require(t, Sort::kBool, "and");
    if (t.is_bool_const()) {
      if (!t.bool_value()) {
        return boolean(false);
      }
      continue;
    }
    kept.push_back(std::move(t));
  }
  if (kept.empty()) {
    return boolean(true);
  }
  if (kept.size() == 1) {
    return kept.front();
  }
  return make(Kind::kAnd, Sort::kBool, std::move(kept));
}

Term lor(std::vector<Term> terms) {
  std::vector<Term> kept;
  for (auto& t : terms) {
    require(t, Sort::kBool, "or");
    if (t.is_bool_const()) {
      if (t.bool_value()) {
        return boolean(true);
      }
      continue;
    }
    kept.push_back(std::move(t));
  }
  if (kept.empty()) {
    return boolean(false);
  }
  if (kept.size() == 1) {
    return kept.front();
  }
  return make(Kind::kOr, Sort::kBool, std::move(kept));
}

Term lnot(const Term& a) {
  require(a, Sort::kBool, "not");
  if (a.is_bool_const()) {
    return boolean(!a.bool_value());
  }
  if (a.kind() == Kind::kNot) {
    return a.children()[0];
  }
  return make(Kind::kNot, Sort::kBool, {a});
}

Term implies(const Term& a, const Term& b) {
  require(a, Sort::kBool, "=>");
  require(b, Sort::kBool, "=>");
  if (a.is_bool_const()) {
    return a.bool_value() ? b : boolean(true);
  }
  if (b.is_bool_const()) {
    return b.bool_value() ? boolean(true) : lnot(a);
  }
  return make(Kind::kImplies, Sort::kBool, {a, b});
}

Term forall(std::vector<std::string> real_vars, const Term& body) {
  require(body, Sort::kBool, "forall");
  if (real_vars.empty() || body.is_bool_const()) {
    return body;
  }
  auto node = std::make_shared<TermNode>();
  node->kind = Kind::kForall;
  node->sort = Sort::kBool;
  node->children = {body};
  for (auto& name : real_vars) {
    node->bindings.emplace_back(std::move(name), Term());
  }
  return Term::from_node(std::move(node));
}

Term let(std::vector<std::pair<std::string, Term>> bindings, const Term& body) {
  if (!body.valid()) {
    throw InvalidInputError("let: null body");
  }
  if (bindings.empty() || body.is_bool_const() || body.is_real_const()) {
    return body;
  }
  for (const auto& [name, value] : bindings) {
    if (name.empty() || !value.valid()) {
      throw InvalidInputError("let: empty binding");
    }
  }
  auto node = std::make_shared<TermNode>();
  node->kind = Kind::kLet;
  node->sort = body.sort();
  node->children = {body};
  node->bindings = std::move(bindings);
  return Term::from_node(std::move(node));
}

Term at_least(std::vector<Term> indicators, std::size_t k) {
  std::vector<Term> open;
  std::size_t already = 0;
  for (auto& t : indicators) {
    require(t, Sort::kBool, "at-least");
    if (t.is_bool_const()) {
      already += t.bool_value() ? 1 : 0;
    } else {
      open.push_back(std::move(t));
    }
  }
  if (already >= k) {
    return boolean(true);
  }
  const std::size_t needed = k - already;
  if (open.size() < needed) {
    return boolean(false);
  }
  auto node = std::make_shared<TermNode>();
  node->kind = Kind::kAtLeast;
  node->sort = Sort::kBool;
  node->children = std::move(open);
  node->threshold = needed;
  return Term::from_node(std::move(node));
}

namespace {

using Lookup = std::function<Rational(const std::string&)>;

// Scoped environment for let-bound names during evaluation.
struct Env {
  const Lookup& outer;
  std::vector<std::pair<std::string, Rational>> scope;

  Rational get(const std::string& name) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (it->first == name) {
        return it->second;
      }
    }
    return outer(name);
  }
};

Rational eval(const Term& t, Env& env);

bool eval_bool(const Term& t, Env& env) { return sgn(eval(t, env)) != 0; }

Rational eval(const Term& t, Env& env) {
  auto kids = t.children();
  switch (t.kind()) {
    case Kind::kRealConst: return t.value();
    case Kind::kBoolConst: return Rational(t.bool_value() ? 1 : 0);
    case Kind::kVar: return env.get(t.name());
    case Kind::kAdd: {
      Rational sum(0);
      for (const auto& c : kids) {
        sum += eval(c, env);
      }
      return sum;
    }
    case Kind::kNeg: return -eval(kids[0], env);
    case Kind::kSub: return eval(kids[0], env) - eval(kids[1], env);
    case Kind::kMul: return eval(kids[0], env) * eval(kids[1], env);
    case Kind::kIte: return eval_bool(kids[0], env) ? eval(kids[1], env) : eval(kids[2], env);
    case Kind::kGt: return Rational(eval(kids[0], env) > eval(kids[1], env) ? 1 : 0);
    case Kind::kGe: return Rational(eval(kids[0], env) >= eval(kids[1], env) ? 1 : 0);
    case Kind::kEq: return Rational(eval(kids[0], env) == eval(kids[1], env) ? 1 : 0);
    case Kind::kLt: return Rational(eval(kids[0], env) < eval(kids[1], env) ? 1 : 0);
    case Kind::kLe: return Rational(eval(kids[0], env) <= eval(kids[1], env) ? 1 : 0);
    case Kind::kAnd:
      for (const auto& c : kids) {
        if (!eval_bool(c, env)) {
          return Rational(0);
        }
      }
      return Rational(1);
    case Kind::kOr:
      for (const auto& c : kids) {
        if (eval_bool(c, env)) {
          return Rational(1);
        }
      }
      return Rational(0);
    case Kind::kNot: return Rational(eval_bool(kids[0], env) ? 0 : 1);
    case Kind::kImplies: return Rational(!eval_bool(kids[0], env) || eval_bool(kids[1], env) ? 1 : 0);
    case Kind::kAtLeast: {
      std::size_t count = 0;
      for (const auto& c : kids) {
        count += eval_bool(c, env) ? 1 : 0;
      }
      return Rational(count >= t.threshold() ? 1 : 0);
    }
    case Kind::kLet: {
      std::vector<std::pair<std::string, Rational>> values;
      for (const auto& [name, value] : t.bindings()) {
        values.emplace_back(name, eval(value, env));
      }
      const std::size_t mark = env.scope.size();
      env.scope.insert(env.scope.end(), values.begin(), values.end());
      Rational result = eval(kids[0], env);
      env.scope.resize(mark);
      return result;
    }
    case Kind::kForall: throw InvalidInputError("cannot evaluate a quantified term");
  }
  throw InvalidInputError("unknown term kind");
}

}  // namespace

Rational evaluate_real(const Term& t, const Lookup& lookup) {
  Env env{lookup, {}};
  return eval(t, env);
}

bool evaluate_bool(const Term& t, const Lookup& lookup) {
  Env env{lookup, {}};
  return eval_bool(t, env);
}

std::size_t count_kind(const Term& t, Kind kind) {
  std::size_t n = t.kind() == kind ? 1 : 0;
  for (const auto& c : t.children()) {
    n += count_kind(c, kind);
  }
  for (const auto& [name, value] : t.bindings()) {
    if (value.valid()) {
      n += count_kind(value, kind);
    }
  }
  return n;
}

}  // namespace nnrepair::smt
