#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nnrepair/network.hpp"
#include "nnrepair/smt/script.hpp"
#include "nnrepair/smt/solver.hpp"

namespace nnrepair {

enum class Norm { kL1, kLinf };

std::string to_string(Norm norm);
Norm parse_norm(std::string_view text);

/// Every input within `delta` of `center` (in `norm`) must be classified as
/// `target_class`.
struct RobustnessProperty {
  std::string name;
  std::vector<Rational> center;
  Rational delta;
  Norm norm = Norm::kL1;
  std::size_t target_class = 0;

  void validate(std::size_t input_dim, std::size_t output_dim) const;
  bool contains(std::span<const Rational> x) const;
  bool contains(std::span<const double> x) const;
};

/// JSON list of {name, center, delta, norm, target_class}.
std::vector<RobustnessProperty> properties_from_json(std::string_view text);
std::string properties_to_json(std::span<const RobustnessProperty> props);
std::vector<RobustnessProperty> load_properties(const std::string& path);
void save_properties(std::span<const RobustnessProperty> props, const std::string& path);

/// Real variables named `<prefix>_0 ... <prefix>_{n-1}`.
std::vector<std::string> variable_names(std::string_view prefix, std::size_t n);
std::vector<smt::Term> real_vars(std::span<const std::string> names);

/// L1: conjunction of the 2^d sign-pattern inequalities. Linf: 2d box bounds.
smt::Term ball_predicate(const RobustnessProperty& prop, std::span<const smt::Term> inputs);

/// out[target] > out[j] for every j != target.
smt::Term class_predicate(std::size_t target, std::span<const smt::Term> outputs);

/// Exactly the inputs where argmax (lowest index on ties) differs from
/// `target`: out[j] >= out[target] for j < target, out[j] > out[target] for
/// j > target, disjoined.
smt::Term misclassification_predicate(std::size_t target, std::span<const smt::Term> outputs);

/// Network compiled over given input terms. Free parameters become real
/// variables named WeightId::name(); every other parameter is an exact
/// constant. Each non-constant hidden neuron is let-bound to
/// ite(pre > 0, pre, 0); outputs are affine in the last hidden layer.
struct NetworkEncoding {
  std::vector<smt::Declaration> declarations;
  std::vector<std::vector<std::pair<std::string, smt::Term>>> bindings;
  std::vector<smt::Term> outputs;

  /// Wraps `body` (which may mention the neuron names) in the let layers.
  smt::Term wrap(const smt::Term& body) const;
};

NetworkEncoding encode_network(const Network& net, const WeightSelection& free,
                               std::span<const smt::Term> inputs,
                               std::string_view neuron_prefix = "h");

enum class PropertyStatus { kHolds, kViolated, kInconclusive };
std::string to_string(PropertyStatus status);

struct VerificationResult {
  PropertyStatus status = PropertyStatus::kInconclusive;
  smt::SolverVerdict verdict;
  /// Model input point when VIOLATED.
  std::optional<std::vector<Rational>> counterexample;
};

/// Quantifier-free linear query: ball(x) and misclassified(f(x)).
smt::Script verification_script(const Network& net, const RobustnessProperty& prop);

/// SAT => VIOLATED with a counterexample that is re-checked by exact
/// evaluation; a counterexample that does not replay is reported as
/// INCONCLUSIVE. UNSAT => HOLDS.
VerificationResult verify_property(const Network& net, const RobustnessProperty& prop,
                                   const smt::SolverOptions& options);

/// True when `x` lies in the ball and decide_exact(net, x) != target.
bool replays_as_counterexample(const Network& net, const RobustnessProperty& prop,
                               std::span<const Rational> x);

/// Pins inputs to `x` and asks for the output values `y_0..`.
smt::Script forward_query_script(const Network& net, std::span<const Rational> x);

// ---------------------------------------------------------------------------
// Soft constraints

enum class HeuristicKind { kSamples, kGrid, kVoronoi };
std::string to_string(HeuristicKind kind);
HeuristicKind parse_heuristic(std::string_view text);

/// A concrete point and the class the repaired network should give it.
struct Anchor {
  std::vector<Rational> point;
  std::size_t label = 0;
};

/// One Boolean indicator; when true, every anchor must be classified as
/// its label (strictly, like class_predicate).
struct SoftConstraint {
  std::string indicator_name;
  std::vector<Anchor> anchors;
};

struct SoftConstraintSet {
  std::vector<SoftConstraint> constraints;
  /// At least this many indicators must hold.
  std::size_t threshold = 1;
  HeuristicKind heuristic = HeuristicKind::kSamples;
  /// Configuration snapshot (JSON text).
  std::string provenance;
  std::vector<std::string> warnings;

  std::size_t size() const { return constraints.size(); }
  SoftConstraintSet with_threshold(std::size_t k) const;
  void validate() const;
};

/// The indicator's body for a particular network and free selection.
smt::Term soft_constraint_body(const Network& net, const WeightSelection& free,
                               const SoftConstraint& constraint);

/// Exact re-evaluation of a soft constraint's body on a concrete network.
bool soft_constraint_holds(const Network& net, const SoftConstraint& constraint);

/// Exists free weights such that every property holds for all inputs in its
/// ball and at least `soft.threshold` indicators hold. Logic NRA.
smt::Script encode_repair(const Network& net, const WeightSelection& free,
                          std::span<const RobustnessProperty> props,
                          const SoftConstraintSet* soft = nullptr);

}  // namespace nnrepair
