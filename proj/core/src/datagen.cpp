#include "nnrepair/datagen.hpp"

#include <charconv>
#include <filesystem>
#include <random>
#include <sstream>

#include <json.hpp>

#include "nnrepair/error.hpp"
#include "nnrepair/file_util.hpp"

namespace nnrepair {

using nlohmann::json;

bool Rect::contains(std::span<const double> x) const {
  if (x.size() != lo.size()) {
    return false;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo[i] || x[i] > hi[i]) {
      return false;
    }
  }
  return true;
}

Rect bounding_box(std::span<const LabeledPoint> points, double margin) {
  if (points.empty()) {
    throw InvalidInputError("bounding box of an empty point set");
  }
  Rect box{points.front().x, points.front().x};
  for (const auto& p : points) {
    for (std::size_t i = 0; i < box.dim(); ++i) {
      box.lo[i] = std::min(box.lo[i], p.x[i]);
      box.hi[i] = std::max(box.hi[i], p.x[i]);
    }
  }
  for (std::size_t i = 0; i < box.dim(); ++i) {
    double pad = (box.hi[i] - box.lo[i]) * margin;
    if (pad == 0.0) {
      pad = 1.0;
    }
    box.lo[i] -= pad;
    box.hi[i] += pad;
  }
  return box;
}

std::vector<LabeledPoint> xor_mini_points() {
  return {{{10, 10}, 0}, {{-10, -10}, 0}, {{-10, 10}, 1}, {{10, -10}, 1}};
}

MixtureSpec xor_a_spec() {
  MixtureSpec spec;
  spec.name = "xor-a";
  for (const auto& p : xor_mini_points()) {
    spec.centroids.push_back({p.x, p.label});
  }
  return spec;
}

MixtureSpec xor_b_spec() {
  MixtureSpec spec = xor_a_spec();
  spec.name = "xor-b";
  spec.keep_probability[1] = 0.65;
  return spec;
}

MixtureSpec blobs_spec() {
  MixtureSpec spec = xor_a_spec();
  spec.name = "blobs";
  spec.centroids.push_back({{30, -30}, 0});
  spec.centroids.push_back({{-30, -30}, 1});
  spec.centroids.push_back({{-30, 30}, 0});
  spec.centroids.push_back({{30, 30}, 1});
  return spec;
}

MixtureSpec mixture_spec_by_name(std::string_view name) {
  if (name == "xor-a") {
    return xor_a_spec();
  }
  if (name == "xor-b") {
    return xor_b_spec();
  }
  if (name == "blobs") {
    return blobs_spec();
  }
  throw ConfigError("unknown dataset spec '" + std::string(name) + "'");
}

bool Dataset::operator==(const Dataset& other) const {
  return train == other.train && test == other.test && sampled == other.sampled &&
         seed == other.seed && spec.name == other.spec.name;
}

namespace {

void validate_spec(const MixtureSpec& spec) {
  if (spec.centroids.empty()) {
    throw ConfigError("mixture spec '" + spec.name + "' has no centroids");
  }
  if (!(spec.stddev >= 0.0)) {
    throw ConfigError("mixture stddev must be non-negative");
  }
  const std::size_t dim = spec.centroids.front().center.size();
  for (const auto& c : spec.centroids) {
    if (c.center.size() != dim || dim == 0) {
      throw ConfigError("mixture centroids must share a positive dimension");
    }
  }
  for (const auto& [label, p] : spec.keep_probability) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw ConfigError("keep probability for label " + std::to_string(label) +
                        " must lie in (0, 1]");
    }
  }
}

std::vector<LabeledPoint> draw_split(const MixtureSpec& spec, std::size_t n,
                                     std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, spec.centroids.size() - 1);
  std::normal_distribution<double> noise(0.0, spec.stddev > 0 ? spec.stddev : 1.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<LabeledPoint> points;
  points.reserve(n);
  while (points.size() < n) {
    const Centroid& c = spec.centroids[pick(rng)];
    LabeledPoint p{c.center, c.label};
    if (spec.stddev > 0) {
      for (double& v : p.x) {
        v += noise(rng);
      }
    }
    if (auto it = spec.keep_probability.find(c.label); it != spec.keep_probability.end()) {
      if (coin(rng) >= it->second) {
        continue;
      }
    }
    points.push_back(std::move(p));
  }
  return points;
}

std::string format_double(double v) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, end);
}

}  // namespace

Dataset generate_mixture(const MixtureSpec& spec, std::size_t n_train, std::size_t n_test,
                         std::uint64_t seed) {
  validate_spec(spec);
  if (n_train == 0 || n_test == 0) {
    throw ConfigError("dataset split sizes must be positive");
  }
  std::mt19937_64 rng(seed);
  Dataset data;
  data.seed = seed;
  data.spec = spec;
  data.train = draw_split(spec, n_train, rng);
  data.test = draw_split(spec, n_test, rng);
  return data;
}

std::vector<LabeledPoint> sample_uniform_labeled(const Network& net, const Rect& bounds,
                                                 std::size_t n, std::uint64_t seed) {
  if (bounds.dim() != net.input_dim()) {
    throw InvalidInputError("sampling bounds dimension differs from network input");
  }
  for (std::size_t i = 0; i < bounds.dim(); ++i) {
    if (!(bounds.lo[i] < bounds.hi[i])) {
      throw InvalidInputError("sampling bounds are degenerate");
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> axes;
  for (std::size_t i = 0; i < bounds.dim(); ++i) {
    axes.emplace_back(bounds.lo[i], bounds.hi[i]);
  }
  std::vector<LabeledPoint> points;
  points.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    LabeledPoint p;
    for (auto& axis : axes) {
      p.x.push_back(axis(rng));
    }
    p.label = net.decide(p.x);
    points.push_back(std::move(p));
  }
  return points;
}

std::string points_to_csv(std::span<const LabeledPoint> points) {
  std::ostringstream out;
  const std::size_t dim = points.empty() ? 2 : points.front().x.size();
  for (std::size_t i = 0; i < dim; ++i) {
    out << 'x' << (i + 1) << ',';
  }
  out << "label\n";
  for (const auto& p : points) {
    for (double v : p.x) {
      out << format_double(v) << ',';
    }
    out << p.label << '\n';
  }
  return out.str();
}

std::vector<LabeledPoint> parse_points_csv(std::string_view text, std::size_t num_classes) {
  std::vector<LabeledPoint> points;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || (line_no == 1 && line[0] == 'x')) {
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream row(line);
    while (std::getline(row, field, ',')) {
      fields.push_back(field);
    }
    if (fields.size() < 2) {
      throw ParseError("expected at least one coordinate and a label", line_no);
    }
    if (dim == 0) {
      dim = fields.size() - 1;
    } else if (fields.size() - 1 != dim) {
      throw ParseError("row has " + std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(dim + 1),
                       line_no);
    }
    LabeledPoint p;
    for (std::size_t i = 0; i < dim; ++i) {
      double v = 0;
      const auto& f = fields[i];
      auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || end != f.data() + f.size()) {
        throw ParseError("bad coordinate '" + f + "'", line_no);
      }
      p.x.push_back(v);
    }
    const auto& lf = fields.back();
    std::size_t label = 0;
    auto [end, ec] = std::from_chars(lf.data(), lf.data() + lf.size(), label);
    if (ec != std::errc() || end != lf.data() + lf.size()) {
      throw ParseError("bad label '" + lf + "'", line_no);
    }
    if (label >= num_classes) {
      throw ValidationError("line " + std::to_string(line_no) + ": label " +
                            std::to_string(label) + " outside [0, " +
                            std::to_string(num_classes) + ")");
    }
    p.label = label;
    points.push_back(std::move(p));
  }
  return points;
}

void save_dataset(const Dataset& data, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_text_file((base / "train.csv").string(), points_to_csv(data.train));
  write_text_file((base / "test.csv").string(), points_to_csv(data.test));
  write_text_file((base / "sampled.csv").string(), points_to_csv(data.sampled));

  json centroids = json::array();
  for (const auto& c : data.spec.centroids) {
    centroids.push_back({{"center", c.center}, {"label", c.label}});
  }
  json keep = json::object();
  for (const auto& [label, p] : data.spec.keep_probability) {
    keep[std::to_string(label)] = p;
  }
  json manifest = {
      {"seed", data.seed},
      {"spec",
       {{"name", data.spec.name},
        {"centroids", centroids},
        {"stddev", data.spec.stddev},
        {"keep_probability", keep}}},
      {"sizes",
       {{"train", data.train.size()}, {"test", data.test.size()}, {"sampled", data.sampled.size()}}},
  };
  write_text_file((base / "manifest.json").string(), manifest.dump(2) + "\n");
}

Dataset load_dataset(const std::string& dir, std::size_t num_classes) {
  const std::filesystem::path base(dir);
  Dataset data;
  json manifest;
  try {
    manifest = json::parse(read_text_file((base / "manifest.json").string()));
    data.seed = manifest.at("seed").get<std::uint64_t>();
    const auto& spec = manifest.at("spec");
    data.spec.name = spec.value("name", "");
    data.spec.stddev = spec.value("stddev", 3.0);
    const json centroids = spec.value("centroids", json::array());
    for (const auto& c : centroids) {
      data.spec.centroids.push_back(
          {c.at("center").get<std::vector<double>>(), c.at("label").get<std::size_t>()});
    }
    const json keep = spec.value("keep_probability", json::object());
    for (const auto& [label, p] : keep.items()) {
      data.spec.keep_probability[std::stoul(label)] = p.get<double>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("dataset manifest: ") + e.what());
  }

  auto load_split = [&](const char* name) {
    auto path = base / name;
    if (!std::filesystem::exists(path)) {
      return std::vector<LabeledPoint>{};
    }
    try {
      return parse_points_csv(read_text_file(path.string()), num_classes);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ": " + e.what());
    }
  };
  data.train = load_split("train.csv");
  data.test = load_split("test.csv");
  data.sampled = load_split("sampled.csv");

  if (manifest.contains("sizes")) {
    const auto& sizes = manifest.at("sizes");
    if (sizes.value("train", data.train.size()) != data.train.size() ||
        sizes.value("test", data.test.size()) != data.test.size()) {
      throw ValidationError("dataset " + dir + ": split sizes disagree with manifest");
    }
  }
  return data;
}

}  // namespace nnrepair
