#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnrepair/rational.hpp"

namespace nnrepair {

enum class ParamKind { kWeight, kBias };

/// Address of a single scalar parameter. `layer` is 1-based; `col` is 0 for
/// biases.
struct WeightId {
  std::size_t layer = 1;
  ParamKind kind = ParamKind::kWeight;
  std::size_t row = 0;
  std::size_t col = 0;

  static WeightId weight(std::size_t layer, std::size_t row, std::size_t col) {
    return {layer, ParamKind::kWeight, row, col};
  }
  static WeightId bias(std::size_t layer, std::size_t row) {
    return {layer, ParamKind::kBias, row, 0};
  }

  /// "w_<layer>_<row>_<col>" or "b_<layer>_<row>"; also the SMT symbol.
  std::string name() const;
  static WeightId parse(std::string_view name);

  auto operator<=>(const WeightId&) const = default;
};

/// A set of distinct parameter addresses, kept sorted.
class WeightSelection {
 public:
  WeightSelection() = default;
  WeightSelection(std::initializer_list<WeightId> ids);
  explicit WeightSelection(std::vector<WeightId> ids);

  const std::vector<WeightId>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(const WeightId& id) const;
  bool is_subset_of(const WeightSelection& other) const;

  /// Space-separated names, e.g. "w_1_0_0 b_2_1".
  std::string to_string() const;
  static WeightSelection parse(std::string_view text);

  auto operator<=>(const WeightSelection&) const = default;

 private:
  std::vector<WeightId> ids_;
};

using Assignment = std::map<WeightId, Rational>;

/// Dense layer. Weights are row-major with `rows` = output width.
struct LayerParams {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rational> weights;
  std::vector<Rational> biases;

  const Rational& weight(std::size_t r, std::size_t c) const { return weights[r * cols + c]; }
  Rational& weight(std::size_t r, std::size_t c) { return weights[r * cols + c]; }

  static LayerParams zeros(std::size_t rows, std::size_t cols);
};

/// Restricts enumerate_weight_ids to a layer and/or parameter kind.
struct WeightFilter {
  std::optional<std::size_t> layer;  // 1-based
  bool last_layer_only = false;
  std::optional<ParamKind> kind;

  bool accepts(const WeightId& id, std::size_t layer_count) const;
};

/// Feed-forward ReLU network: ReLU on every hidden layer, identity on the
/// output layer. Immutable; parameters are exact rationals with a cached
/// double copy for fast evaluation.
class Network {
 public:
  explicit Network(std::vector<LayerParams> layers);

  /// All-zero network with the given widths, e.g. {2, 4, 2}.
  static Network zeros(std::span<const std::size_t> topology);

  std::size_t input_dim() const { return layers_.front().cols; }
  std::size_t output_dim() const { return layers_.back().rows; }
  std::size_t layer_count() const { return layers_.size(); }
  /// 1-based, matching WeightId::layer.
  const LayerParams& layer(std::size_t index) const;
  const std::vector<LayerParams>& layers() const { return layers_; }
  std::vector<std::size_t> topology() const;

  std::vector<double> forward(std::span<const double> x) const;
  std::vector<Rational> forward_exact(std::span<const Rational> x) const;

  /// argmax of forward(x); ties go to the lowest index.
  std::size_t decide(std::span<const double> x) const;
  std::size_t decide_exact(std::span<const Rational> x) const;

  std::size_t param_count() const;
  std::vector<WeightId> enumerate_weight_ids(const WeightFilter& filter = {}) const;

  bool is_valid(const WeightId& id) const;
  const Rational& parameter(const WeightId& id) const;
  Network substitute(const Assignment& assignment) const;

  bool operator==(const Network& other) const;

 private:
  void check_input(std::size_t size) const;

  std::vector<LayerParams> layers_;
  std::vector<std::vector<double>> weights_d_;
  std::vector<std::vector<double>> biases_d_;
};

/// argmax with lowest-index tie breaking.
std::size_t argmax(std::span<const double> values);
std::size_t argmax(std::span<const Rational> values);

/// Parses "2,4,2" into {2, 4, 2}.
std::vector<std::size_t> parse_topology(std::string_view text);

// JSON model exchange format:
// {"input_dim": 2, "output_dim": 2,
//  "layers": [{"weights": [["0.5", "-1"], ...], "biases": ["0", ...]}, ...]}
std::string network_to_json(const Network& net);
Network network_from_json(std::string_view text);
void save_network(const Network& net, const std::string& path);
Network load_network(const std::string& path);

}  // namespace nnrepair
