#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nnrepair/error.hpp"
#include "json_detail.hpp"
#include "nnrepair/file_util.hpp"
#include "nnrepair/network.hpp"

namespace nnrepair {

using nlohmann::json;

Rational rational_from_json(const json& value) {
  if (value.is_string()) {
    return parse_rational(value.get<std::string>());
  }
  if (value.is_number_integer()) {
    return Rational(value.get<long>());
  }
  if (value.is_number()) {
    return decimal_from_double(value.get<double>());
  }
  throw ParseError("expected a number or numeric string, got " + value.dump());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidInputError("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidInputError("cannot write '" + path + "'");
  }
  out << text;
}

std::string network_to_json(const Network& net) {
  json doc;
  doc["input_dim"] = net.input_dim();
  doc["output_dim"] = net.output_dim();
  json layers = json::array();
  for (const auto& layer : net.layers()) {
    json rows = json::array();
    for (std::size_t r = 0; r < layer.rows; ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < layer.cols; ++c) {
        row.push_back(format_rational(layer.weight(r, c)));
      }
      rows.push_back(std::move(row));
    }
    json biases = json::array();
    for (const auto& b : layer.biases) {
      biases.push_back(format_rational(b));
    }
    layers.push_back({{"weights", std::move(rows)}, {"biases", std::move(biases)}});
  }
  doc["layers"] = std::move(layers);
  return doc.dump(2) + "\n";
}

Network network_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("network JSON: ") + e.what());
  }
  try {
    std::vector<LayerParams> layers;
    for (const auto& entry : doc.at("layers")) {
      const auto& rows = entry.at("weights");
      LayerParams layer;
      layer.rows = rows.size();
      layer.cols = layer.rows == 0 ? 0 : rows.at(0).size();
      for (const auto& row : rows) {
        if (row.size() != layer.cols) {
          throw ValidationError("network JSON: ragged weight matrix");
        }
        for (const auto& v : row) {
          layer.weights.push_back(rational_from_json(v));
        }
      }
      for (const auto& b : entry.at("biases")) {
        layer.biases.push_back(rational_from_json(b));
      }
      layers.push_back(std::move(layer));
    }
    Network net(std::move(layers));
    if (doc.contains("input_dim") && doc.at("input_dim").get<std::size_t>() != net.input_dim()) {
      throw ValidationError("network JSON: input_dim disagrees with first layer");
    }
    if (doc.contains("output_dim") &&
        doc.at("output_dim").get<std::size_t>() != net.output_dim()) {
      throw ValidationError("network JSON: output_dim disagrees with last layer");
    }
    return net;
  } catch (const json::exception& e) {
    throw ParseError(std::string("network JSON: ") + e.what());
  }
}

void save_network(const Network& net, const std::string& path) {
  write_text_file(path, network_to_json(net));
}

Network load_network(const std::string& path) { return network_from_json(read_text_file(path)); }

}  // namespace nnrepair
