#include <json.hpp>

#include "json_detail.hpp"
#include "nnrepair/encoder.hpp"
#include "nnrepair/error.hpp"
#include "nnrepair/file_util.hpp"

namespace nnrepair {

using nlohmann::json;

std::vector<RobustnessProperty> properties_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("property file: ") + e.what());
  }
  if (doc.is_object() && doc.contains("properties")) {
    doc = doc.at("properties");
  }
  if (!doc.is_array()) {
    throw ValidationError("property file must hold a list of properties");
  }
  std::vector<RobustnessProperty> props;
  try {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const json& item = doc[i];
      RobustnessProperty p;
      p.name = item.value("name", "p" + std::to_string(i));
      for (const auto& v : item.at("center")) {
        p.center.push_back(rational_from_json(v));
      }
      p.delta = rational_from_json(item.at("delta"));
      p.norm = parse_norm(item.value("norm", std::string("L1")));
      p.target_class = item.at("target_class").get<std::size_t>();
      if (sgn(p.delta) <= 0) {
        throw ValidationError("property '" + p.name + "': delta must be positive");
      }
      props.push_back(std::move(p));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed property: ") + e.what());
  }
  return props;
}

std::string properties_to_json(std::span<const RobustnessProperty> props) {
  json doc = json::array();
  for (const auto& p : props) {
    json center = json::array();
    for (const auto& c : p.center) {
      center.push_back(format_rational(c));
    }
    doc.push_back({{"name", p.name},
                   {"center", center},
                   {"delta", format_rational(p.delta)},
                   {"norm", to_string(p.norm)},
                   {"target_class", p.target_class}});
  }
  return doc.dump(2) + "\n";
}

std::vector<RobustnessProperty> load_properties(const std::string& path) {
  return properties_from_json(read_text_file(path));
}

void save_properties(std::span<const RobustnessProperty> props, const std::string& path) {
  write_text_file(path, properties_to_json(props));
}

}  // namespace nnrepair
