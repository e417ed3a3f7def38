#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nnrepair/rational.hpp"

namespace nnrepair::smt {

enum class Sort { kReal, kBool };

enum class Kind {
  kRealConst,
  kBoolConst,
  kVar,
  kAdd,
  kNeg,
  kSub,
  kMul,
  kIte,
  kGt,
  kGe,
  kEq,
  kLt,
  kLe,
  kAnd,
  kOr,
  kNot,
  kImplies,
  kForall,
  kLet,
  kAtLeast,
};

class TermNode;

/// Immutable, shared formula node. Factories fold constants eagerly, so a
/// subterm that does not mention any variable collapses to a literal.
/// There is no division: every real term is a polynomial.
class Term {
 public:
  Term() = default;

  bool valid() const { return node_ != nullptr; }
  Kind kind() const;
  Sort sort() const;
  bool is_real_const() const { return valid() && kind() == Kind::kRealConst; }
  bool is_bool_const() const { return valid() && kind() == Kind::kBoolConst; }
  const Rational& value() const;
  bool bool_value() const;
  /// Variable name (kVar).
  const std::string& name() const;
  std::span<const Term> children() const;
  /// Bound variables (kForall) or let bindings (kLet).
  std::vector<std::pair<std::string, Term>> bindings() const;
  /// Threshold of a kAtLeast term.
  std::size_t threshold() const;

  /// Number of nodes reachable from this term, counted as a tree.
  std::size_t tree_size() const;

  const TermNode* node() const { return node_.get(); }

  static Term from_node(std::shared_ptr<const TermNode> node) { return Term(std::move(node)); }

 private:
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}

  std::shared_ptr<const TermNode> node_;
};

class TermNode {
 public:
  Kind kind;
  Sort sort;
  Rational value;
  bool bool_value = false;
  std::string name;
  std::vector<Term> children;
  std::vector<std::pair<std::string, Term>> bindings;
  std::size_t threshold = 0;
};

Term real(const Rational& value);
Term real(long value);
Term boolean(bool value);
Term var(std::string name, Sort sort = Sort::kReal);

Term add(std::vector<Term> terms);
Term neg(const Term& a);
Term sub(const Term& a, const Term& b);
Term mul(const Term& a, const Term& b);
Term ite(const Term& cond, const Term& then_term, const Term& else_term);

Term gt(const Term& a, const Term& b);
Term ge(const Term& a, const Term& b);
Term eq(const Term& a, const Term& b);
Term lt(const Term& a, const Term& b);
Term le(const Term& a, const Term& b);

Term land(std::vector<Term> terms);
Term lor(std::vector<Term> terms);
Term lnot(const Term& a);
Term implies(const Term& a, const Term& b);

/// Universal quantification over real-sorted variables.
Term forall(std::vector<std::string> real_vars, const Term& body);
/// Parallel let; bindings may not refer to each other.
Term let(std::vector<std::pair<std::string, Term>> bindings, const Term& body);
/// Pseudo-Boolean cardinality: at least `k` of the Boolean `indicators` hold.
Term at_least(std::vector<Term> indicators, std::size_t k);

inline Term operator+(const Term& a, const Term& b) { return add({a, b}); }
inline Term operator-(const Term& a, const Term& b) { return sub(a, b); }
inline Term operator*(const Term& a, const Term& b) { return mul(a, b); }

/// Concrete evaluation. `lookup` maps a free variable name to its value; for
/// Boolean variables a non-zero value means true. Quantifiers are rejected.
Rational evaluate_real(const Term& t,
                       const std::function<Rational(const std::string&)>& lookup);
bool evaluate_bool(const Term& t, const std::function<Rational(const std::string&)>& lookup);

/// Counts nodes of the given kind, as a tree.
std::size_t count_kind(const Term& t, Kind kind);

}  // namespace nnrepair::smt
