#include "nnrepair/network.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nnrepair/error.hpp"

namespace nnrepair {

std::string WeightId::name() const {
  if (kind == ParamKind::kBias) {
    return "b_" + std::to_string(layer) + "_" + std::to_string(row);
  }
  return "w_" + std::to_string(layer) + "_" + std::to_string(row) + "_" + std::to_string(col);
}

WeightId WeightId::parse(std::string_view name) {
  auto fail = [&]() -> WeightId {
    throw ParseError("malformed weight id '" + std::string(name) + "'");
  };
  if (name.size() < 3 || name[1] != '_' || (name[0] != 'w' && name[0] != 'b')) {
    return fail();
  }
  std::vector<std::size_t> parts;
  std::string_view rest = name.substr(2);
  while (true) {
    auto sep = rest.find('_');
    std::string_view piece = rest.substr(0, sep);
    if (piece.empty() || piece.find_first_not_of("0123456789") != std::string_view::npos) {
      return fail();
    }
    parts.push_back(std::stoul(std::string(piece)));
    if (sep == std::string_view::npos) {
      break;
    }
    rest = rest.substr(sep + 1);
  }
  if (name[0] == 'w' && parts.size() == 3 && parts[0] >= 1) {
    return WeightId::weight(parts[0], parts[1], parts[2]);
  }
  if (name[0] == 'b' && parts.size() == 2 && parts[0] >= 1) {
    return WeightId::bias(parts[0], parts[1]);
  }
  return fail();
}

WeightSelection::WeightSelection(std::initializer_list<WeightId> ids)
    : WeightSelection(std::vector<WeightId>(ids)) {}

WeightSelection::WeightSelection(std::vector<WeightId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

bool WeightSelection::contains(const WeightId& id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

bool WeightSelection::is_subset_of(const WeightSelection& other) const {
  return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

std::string WeightSelection::to_string() const {
  std::string out;
  for (const auto& id : ids_) {
    if (!out.empty()) {
      out += ' ';
    }
    out += id.name();
  }
  return out;
}

WeightSelection WeightSelection::parse(std::string_view text) {
  std::vector<WeightId> ids;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    ids.push_back(WeightId::parse(token));
  }
  return WeightSelection(std::move(ids));
}

LayerParams LayerParams::zeros(std::size_t rows, std::size_t cols) {
  LayerParams layer;
  layer.rows = rows;
  layer.cols = cols;
  layer.weights.assign(rows * cols, Rational(0));
  layer.biases.assign(rows, Rational(0));
  return layer;
}

bool WeightFilter::accepts(const WeightId& id, std::size_t layer_count) const {
  if (layer && id.layer != *layer) {
    return false;
  }
  if (last_layer_only && id.layer != layer_count) {
    return false;
  }
  if (kind && id.kind != *kind) {
    return false;
  }
  return true;
}

Network::Network(std::vector<LayerParams> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) {
    throw InvalidInputError("network needs at least one layer");
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& layer = layers_[i];
    if (layer.rows == 0 || layer.cols == 0) {
      throw InvalidInputError("layer " + std::to_string(i + 1) + " has a zero dimension");
    }
    if (layer.weights.size() != layer.rows * layer.cols || layer.biases.size() != layer.rows) {
      throw InvalidInputError("layer " + std::to_string(i + 1) +
                              ": weight/bias sizes disagree with its dimensions");
    }
    if (i > 0 && layers_[i - 1].rows != layer.cols) {
      throw InvalidInputError("layer " + std::to_string(i + 1) + " expects input width " +
                              std::to_string(layer.cols) + " but previous layer outputs " +
                              std::to_string(layers_[i - 1].rows));
    }
  }
  weights_d_.reserve(layers_.size());
  biases_d_.reserve(layers_.size());
  for (const auto& layer : layers_) {
    weights_d_.push_back(to_doubles(layer.weights));
    biases_d_.push_back(to_doubles(layer.biases));
  }
}

Network Network::zeros(std::span<const std::size_t> topology) {
  if (topology.size() < 2) {
    throw InvalidInputError("topology needs at least input and output widths");
  }
  std::vector<LayerParams> layers;
  for (std::size_t i = 1; i < topology.size(); ++i) {
    layers.push_back(LayerParams::zeros(topology[i], topology[i - 1]));
  }
  return Network(std::move(layers));
}

const LayerParams& Network::layer(std::size_t index) const {
  if (index == 0 || index > layers_.size()) {
    throw AddressError("layer index " + std::to_string(index) + " out of range");
  }
  return layers_[index - 1];
}

std::vector<std::size_t> Network::topology() const {
  std::vector<std::size_t> widths{input_dim()};
  for (const auto& layer : layers_) {
    widths.push_back(layer.rows);
  }
  return widths;
}

void Network::check_input(std::size_t size) const {
  if (size != input_dim()) {
    throw InvalidInputError("input has length " + std::to_string(size) + ", network expects " +
                            std::to_string(input_dim()));
  }
}

std::vector<double> Network::forward(std::span<const double> x) const {
  check_input(x.size());
  std::vector<double> current(x.begin(), x.end());
  for (const double v : current) {
    if (!std::isfinite(v)) {
      throw InvalidInputError("input contains a non-finite value");
    }
  }
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const auto& w = weights_d_[l];
    const auto& b = biases_d_[l];
    const bool hidden = l + 1 < layers_.size();
    next.assign(layer.rows, 0.0);
    for (std::size_t r = 0; r < layer.rows; ++r) {
      double sum = b[r];
      for (std::size_t c = 0; c < layer.cols; ++c) {
        sum += w[r * layer.cols + c] * current[c];
      }
      next[r] = hidden ? std::max(0.0, sum) : sum;
    }
    current.swap(next);
  }
  return current;
}

std::vector<Rational> Network::forward_exact(std::span<const Rational> x) const {
  check_input(x.size());
  std::vector<Rational> current(x.begin(), x.end());
  std::vector<Rational> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const bool hidden = l + 1 < layers_.size();
    next.assign(layer.rows, Rational(0));
    for (std::size_t r = 0; r < layer.rows; ++r) {
      Rational sum = layer.biases[r];
      for (std::size_t c = 0; c < layer.cols; ++c) {
        sum += layer.weight(r, c) * current[c];
      }
      if (hidden && sgn(sum) < 0) {
        sum = 0;
      }
      next[r] = sum;
    }
    current.swap(next);
  }
  return current;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) {
      best = i;
    }
  }
  return best;
}

std::size_t argmax(std::span<const Rational> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) {
      best = i;
    }
  }
  return best;
}

std::size_t Network::decide(std::span<const double> x) const { return argmax(forward(x)); }

std::size_t Network::decide_exact(std::span<const Rational> x) const {
  return argmax(forward_exact(x));
}

std::size_t Network::param_count() const {
  std::size_t count = 0;
  for (const auto& layer : layers_) {
    count += layer.rows * layer.cols + layer.rows;
  }
  return count;
}

std::vector<WeightId> Network::enumerate_weight_ids(const WeightFilter& filter) const {
  std::vector<WeightId> ids;
  for (std::size_t l = 1; l <= layers_.size(); ++l) {
    const auto& layer = layers_[l - 1];
    for (std::size_t r = 0; r < layer.rows; ++r) {
      for (std::size_t c = 0; c < layer.cols; ++c) {
        WeightId id = WeightId::weight(l, r, c);
        if (filter.accepts(id, layers_.size())) {
          ids.push_back(id);
        }
      }
    }
    for (std::size_t r = 0; r < layer.rows; ++r) {
      WeightId id = WeightId::bias(l, r);
      if (filter.accepts(id, layers_.size())) {
        ids.push_back(id);
      }
    }
  }
  return ids;
}

bool Network::is_valid(const WeightId& id) const {
  if (id.layer == 0 || id.layer > layers_.size()) {
    return false;
  }
  const auto& layer = layers_[id.layer - 1];
  if (id.kind == ParamKind::kBias) {
    return id.row < layer.rows && id.col == 0;
  }
  return id.row < layer.rows && id.col < layer.cols;
}

const Rational& Network::parameter(const WeightId& id) const {
  if (!is_valid(id)) {
    throw AddressError("no parameter " + id.name() + " in this network");
  }
  const auto& layer = layers_[id.layer - 1];
  return id.kind == ParamKind::kBias ? layer.biases[id.row] : layer.weight(id.row, id.col);
}

Network Network::substitute(const Assignment& assignment) const {
  std::vector<LayerParams> layers = layers_;
  for (const auto& [id, value] : assignment) {
    if (!is_valid(id)) {
      throw AddressError("no parameter " + id.name() + " in this network");
    }
    auto& layer = layers[id.layer - 1];
    if (id.kind == ParamKind::kBias) {
      layer.biases[id.row] = value;
    } else {
      layer.weight(id.row, id.col) = value;
    }
  }
  return Network(std::move(layers));
}

bool Network::operator==(const Network& other) const {
  if (layers_.size() != other.layers_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& a = layers_[i];
    const auto& b = other.layers_[i];
    if (a.rows != b.rows || a.cols != b.cols || a.weights != b.weights || a.biases != b.biases) {
      return false;
    }
  }
  return true;
}

std::vector<std::size_t> parse_topology(std::string_view text) {
  std::vector<std::size_t> widths;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789 ") != std::string::npos) {
      throw ParseError("malformed topology '" + std::string(text) + "'");
    }
    widths.push_back(std::stoul(item));
    if (widths.back() == 0) {
      throw ParseError("topology widths must be positive");
    }
  }
  if (widths.size() < 2) {
    throw ParseError("topology needs at least two widths");
  }
  return widths;
}

}  // namespace nnrepair
