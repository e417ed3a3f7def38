#include "nnrepair/encoder.hpp"

#include <cmath>

#include "nnrepair/error.hpp"

namespace nnrepair {

using smt::Term;

std::string to_string(Norm norm) { return norm == Norm::kL1 ? "L1" : "Linf"; }

Norm parse_norm(std::string_view text) {
  if (text == "L1" || text == "l1") {
    return Norm::kL1;
  }
  if (text == "Linf" || text == "linf" || text == "LINF" || text == "inf") {
    return Norm::kLinf;
  }
  throw InvalidInputError("unknown norm '" + std::string(text) + "'");
}

void RobustnessProperty::validate(std::size_t input_dim, std::size_t output_dim) const {
  if (center.size() != input_dim) {
    throw InvalidInputError("property '" + name + "': center has " +
                            std::to_string(center.size()) + " coordinates, network expects " +
                            std::to_string(input_dim));
  }
  if (sgn(delta) <= 0) {
    throw InvalidInputError("property '" + name + "': delta must be positive");
  }
  if (target_class >= output_dim) {
    throw InvalidInputError("property '" + name + "': target class " +
                            std::to_string(target_class) + " out of range");
  }
}

bool RobustnessProperty::contains(std::span<const Rational> x) const {
  if (x.size() != center.size()) {
    throw InvalidInputError("point dimension does not match property center");
  }
  Rational total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Rational d = abs(Rational(x[i] - center[i]));
    if (norm == Norm::kL1) {
      total += d;
    } else if (d > delta) {
      return false;
    }
  }
  return norm == Norm::kLinf || total <= delta;
}

bool RobustnessProperty::contains(std::span<const double> x) const {
  std::vector<Rational> exact;
  exact.reserve(x.size());
  for (double v : x) {
    exact.push_back(exact_from_double(v));
  }
  return contains(std::span<const Rational>(exact));
}

std::vector<std::string> variable_names(std::string_view prefix, std::size_t n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back(std::string(prefix) + "_" + std::to_string(i));
  }
  return names;
}

std::vector<Term> real_vars(std::span<const std::string> names) {
  std::vector<Term> vars;
  vars.reserve(names.size());
  for (const auto& n : names) {
    vars.push_back(smt::var(n));
  }
  return vars;
}

Term ball_predicate(const RobustnessProperty& prop, std::span<const Term> inputs) {
  if (inputs.size() != prop.center.size()) {
    throw InvalidInputError("ball predicate: input count does not match center");
  }
  const std::size_t d = inputs.size();
  std::vector<Term> parts;
  if (prop.norm == Norm::kLinf) {
    for (std::size_t i = 0; i < d; ++i) {
      parts.push_back(smt::le(smt::real(prop.center[i] - prop.delta), inputs[i]));
      parts.push_back(smt::le(inputs[i], smt::real(prop.center[i] + prop.delta)));
    }
    return smt::land(std::move(parts));
  }
  if (d >= 20) {
    throw InvalidInputError("L1 ball predicate needs 2^d inequalities; dimension too large");
  }
  for (std::size_t pattern = 0; pattern < (std::size_t{1} << d); ++pattern) {
    std::vector<Term> sum;
    for (std::size_t i = 0; i < d; ++i) {
      const bool negative = (pattern >> (d - 1 - i)) & 1U;
      const Term c = smt::real(prop.center[i]);
      sum.push_back(negative ? smt::sub(c, inputs[i]) : smt::sub(inputs[i], c));
    }
    parts.push_back(smt::le(smt::add(std::move(sum)), smt::real(prop.delta)));
  }
  return smt::land(std::move(parts));
}

Term class_predicate(std::size_t target, std::span<const Term> outputs) {
  if (target >= outputs.size()) {
    throw InvalidInputError("target class out of range");
  }
  std::vector<Term> parts;
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    if (j != target) {
      parts.push_back(smt::gt(outputs[target], outputs[j]));
    }
  }
  return smt::land(std::move(parts));
}

Term misclassification_predicate(std::size_t target, std::span<const Term> outputs) {
  if (target >= outputs.size()) {
    throw InvalidInputError("target class out of range");
  }
  std::vector<Term> parts;
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    if (j < target) {
      parts.push_back(smt::ge(outputs[j], outputs[target]));
    } else if (j > target) {
      parts.push_back(smt::gt(outputs[j], outputs[target]));
    }
  }
  return smt::lor(std::move(parts));
}

Term NetworkEncoding::wrap(const Term& body) const {
  Term result = body;
  for (auto it = bindings.rbegin(); it != bindings.rend(); ++it) {
    result = smt::let(*it, result);
  }
  return result;
}

NetworkEncoding encode_network(const Network& net, const WeightSelection& free,
                               std::span<const Term> inputs, std::string_view neuron_prefix) {
  if (inputs.size() != net.input_dim()) {
    throw InvalidInputError("encode_network: expected " + std::to_string(net.input_dim()) +
                            " inputs, got " + std::to_string(inputs.size()));
  }
  NetworkEncoding enc;
  for (const auto& id : free.ids()) {
    if (!net.is_valid(id)) {
      throw AddressError("free parameter " + id.name() + " is not in the network");
    }
    enc.declarations.push_back({id.name(), smt::Sort::kReal});
  }
  auto param = [&](const WeightId& id) {
    return free.contains(id) ? smt::var(id.name()) : smt::real(net.parameter(id));
  };

  std::vector<Term> current(inputs.begin(), inputs.end());
  const std::size_t depth = net.layer_count();
  for (std::size_t l = 1; l <= depth; ++l) {
    const LayerParams& layer = net.layer(l);
    const bool hidden = l < depth;
    std::vector<Term> next;
    std::vector<std::pair<std::string, Term>> group;
    for (std::size_t r = 0; r < layer.rows; ++r) {
      std::vector<Term> sum;
      for (std::size_t c = 0; c < layer.cols; ++c) {
        sum.push_back(smt::mul(param(WeightId::weight(l, r, c)), current[c]));
      }
      sum.push_back(param(WeightId::bias(l, r)));
      Term pre = smt::add(std::move(sum));
      if (!hidden) {
        next.push_back(pre);
        continue;
      }
      Term value = smt::ite(smt::gt(pre, smt::real(0)), pre, smt::real(0));
      if (value.is_real_const()) {
        next.push_back(value);
      } else {
        std::string name =
            std::string(neuron_prefix) + "_" + std::to_string(l) + "_" + std::to_string(r);
        group.emplace_back(name, value);
        next.push_back(smt::var(name));
      }
    }
    if (!group.empty()) {
      enc.bindings.push_back(std::move(group));
    }
    current = std::move(next);
  }
  enc.outputs = std::move(current);
  return enc;
}

std::string to_string(PropertyStatus status) {
  switch (status) {
    case PropertyStatus::kHolds:
      return "HOLDS";
    case PropertyStatus::kViolated:
      return "VIOLATED";
    case PropertyStatus::kInconclusive:
      return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

smt::Script verification_script(const Network& net, const RobustnessProperty& prop) {
  prop.validate(net.input_dim(), net.output_dim());
  smt::Script script;
  script.logic = "QF_LRA";
  script.options.emplace_back("produce-models", "true");
  const auto names = variable_names("x", net.input_dim());
  for (const auto& n : names) {
    script.declare(n, smt::Sort::kReal);
  }
  const auto inputs = real_vars(names);
  const NetworkEncoding enc = encode_network(net, {}, inputs);
  script.assert_term(ball_predicate(prop, inputs));
  script.assert_term(enc.wrap(misclassification_predicate(prop.target_class, enc.outputs)));
  script.get_values = names;
  script.comments.push_back("verify " + prop.name);
  return script;
}

bool replays_as_counterexample(const Network& net, const RobustnessProperty& prop,
                               std::span<const Rational> x) {
  return prop.contains(x) && net.decide_exact(x) != prop.target_class;
}

VerificationResult verify_property(const Network& net, const RobustnessProperty& prop,
                                   const smt::SolverOptions& options) {
  VerificationResult result;
  const smt::Script script = verification_script(net, prop);
  result.verdict = smt::run_solver(script, options, "verify_" + prop.name);
  switch (result.verdict.status) {
    case smt::SolverStatus::kUnsat:
      result.status = PropertyStatus::kHolds;
      break;
    case smt::SolverStatus::kSat: {
      std::vector<Rational> x;
      for (const auto& n : script.get_values) {
        x.push_back(result.verdict.model->at(n));
      }
      if (replays_as_counterexample(net, prop, x)) {
        result.status = PropertyStatus::kViolated;
        result.counterexample = std::move(x);
      } else {
        result.status = PropertyStatus::kInconclusive;
        result.verdict.message = "counterexample did not replay under exact evaluation";
      }
      break;
    }
    default:
      result.status = PropertyStatus::kInconclusive;
      break;
  }
  return result;
}

smt::Script forward_query_script(const Network& net, std::span<const Rational> x) {
  if (x.size() != net.input_dim()) {
    throw InvalidInputError("forward query: input dimension mismatch");
  }
  smt::Script script;
  script.logic = "QF_LRA";
  script.options.emplace_back("produce-models", "true");
  const auto in_names = variable_names("x", net.input_dim());
  const auto out_names = variable_names("y", net.output_dim());
  for (const auto& n : in_names) {
    script.declare(n, smt::Sort::kReal);
  }
  for (const auto& n : out_names) {
    script.declare(n, smt::Sort::kReal);
  }
  const auto inputs = real_vars(in_names);
  const auto outputs = real_vars(out_names);
  for (std::size_t i = 0; i < x.size(); ++i) {
    script.assert_term(smt::eq(inputs[i], smt::real(x[i])));
  }
  const NetworkEncoding enc = encode_network(net, {}, inputs);
  std::vector<Term> eqs;
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    eqs.push_back(smt::eq(outputs[j], enc.outputs[j]));
  }
  script.assert_term(enc.wrap(smt::land(std::move(eqs))));
  script.get_values = out_names;
  return script;
}

std::string to_string(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::kSamples:
      return "samples";
    case HeuristicKind::kGrid:
      return "grid";
    case HeuristicKind::kVoronoi:
      return "voronoi";
  }
  return "samples";
}

HeuristicKind parse_heuristic(std::string_view text) {
  if (text == "samples") {
    return HeuristicKind::kSamples;
  }
  if (text == "grid") {
    return HeuristicKind::kGrid;
  }
  if (text == "voronoi") {
    return HeuristicKind::kVoronoi;
  }
  throw ConfigError("unknown heuristic '" + std::string(text) + "'");
}

SoftConstraintSet SoftConstraintSet::with_threshold(std::size_t k) const {
  SoftConstraintSet copy = *this;
  copy.threshold = k;
  copy.validate();
  return copy;
}

void SoftConstraintSet::validate() const {
  if (constraints.empty()) {
    throw ConfigError("soft constraint set is empty");
  }
  if (threshold < 1 || threshold > constraints.size()) {
    throw ConfigError("threshold " + std::to_string(threshold) + " outside [1, " +
                      std::to_string(constraints.size()) + "]");
  }
  for (const auto& c : constraints) {
    if (c.anchors.empty()) {
      throw ConfigError("soft constraint '" + c.indicator_name + "' has no anchors");
    }
  }
}

Term soft_constraint_body(const Network& net, const WeightSelection& free,
                          const SoftConstraint& constraint) {
  std::vector<Term> parts;
  for (const auto& anchor : constraint.anchors) {
    std::vector<Term> inputs;
    for (const auto& v : anchor.point) {
      inputs.push_back(smt::real(v));
    }
    const NetworkEncoding enc = encode_network(net, free, inputs);
    parts.push_back(enc.wrap(class_predicate(anchor.label, enc.outputs)));
  }
  return smt::land(std::move(parts));
}

bool soft_constraint_holds(const Network& net, const SoftConstraint& constraint) {
  for (const auto& anchor : constraint.anchors) {
    const auto out = net.forward_exact(anchor.point);
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (j != anchor.label && !(out[anchor.label] > out[j])) {
        return false;
      }
    }
  }
  return true;
}

smt::Script encode_repair(const Network& net, const WeightSelection& free,
                          std::span<const RobustnessProperty> props,
                          const SoftConstraintSet* soft) {
  if (free.empty()) {
    throw InvalidInputError("repair query needs at least one free parameter");
  }
  smt::Script script;
  script.logic = "NRA";
  script.options.emplace_back("produce-models", "true");

  const auto names = variable_names("x", net.input_dim());
  const auto inputs = real_vars(names);
  const NetworkEncoding symbolic = encode_network(net, free, inputs);
  for (const auto& d : symbolic.declarations) {
    script.declare(d.name, d.sort);
  }
  for (const auto& prop : props) {
    prop.validate(net.input_dim(), net.output_dim());
    const Term body =
        smt::implies(ball_predicate(prop, inputs),
                     symbolic.wrap(class_predicate(prop.target_class, symbolic.outputs)));
    script.assert_term(smt::forall(names, body));
  }

  std::vector<std::string> values;
  for (const auto& d : symbolic.declarations) {
    values.push_back(d.name);
  }
  if (soft != nullptr) {
    soft->validate();
    std::vector<Term> indicators;
    for (const auto& c : soft->constraints) {
      script.declare(c.indicator_name, smt::Sort::kBool);
      const Term b = smt::var(c.indicator_name, smt::Sort::kBool);
      script.assert_term(smt::implies(b, soft_constraint_body(net, free, c)));
      indicators.push_back(b);
      values.push_back(c.indicator_name);
    }
    script.assert_term(smt::at_least(std::move(indicators), soft->threshold));
  }
  script.get_values = std::move(values);
  return script;
}

}  // namespace nnrepair
