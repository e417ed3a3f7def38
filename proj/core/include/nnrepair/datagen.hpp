#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nnrepair/network.hpp"

namespace nnrepair {

struct LabeledPoint {
  std::vector<double> x;
  std::size_t label = 0;

  bool operator==(const LabeledPoint&) const = default;
};

/// Axis-aligned box, used for sampling bounds, grids and clipping.
struct Rect {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const { return lo.size(); }
  bool contains(std::span<const double> x) const;
  bool operator==(const Rect&) const = default;
};

/// Bounding box of the points, each side widened by `margin` times its
/// extent (0.1 = 10%).
Rect bounding_box(std::span<const LabeledPoint> points, double margin = 0.1);

struct Centroid {
  std::vector<double> center;
  std::size_t label = 0;
};

/// Isotropic Gaussian mixture. A label listed in `keep_probability` is
/// accepted with that probability after being drawn (rejection down-sampling).
struct MixtureSpec {
  std::string name;
  std::vector<Centroid> centroids;
  double stddev = 3.0;
  std::map<std::size_t, double> keep_probability;
};

/// The four XOR points (10,10):0, (-10,-10):0, (-10,10):1, (10,-10):1.
std::vector<LabeledPoint> xor_mini_points();
MixtureSpec xor_a_spec();
/// XOR-A centroids with label 1 kept with probability 0.65.
MixtureSpec xor_b_spec();
/// Eight centroids: the XOR four plus (30,-30):0, (-30,-30):1, (-30,30):0, (30,30):1.
MixtureSpec blobs_spec();
/// "xor-a", "xor-b" or "blobs".
MixtureSpec mixture_spec_by_name(std::string_view name);

struct Dataset {
  std::vector<LabeledPoint> train;
  std::vector<LabeledPoint> test;
  /// Uniform points labelled by the original network (may be empty).
  std::vector<LabeledPoint> sampled;
  std::uint64_t seed = 0;
  MixtureSpec spec;

  bool operator==(const Dataset& other) const;
};

Dataset generate_mixture(const MixtureSpec& spec, std::size_t n_train, std::size_t n_test,
                         std::uint64_t seed);

/// `n` uniform points in `bounds`, each labelled decide(net, x).
std::vector<LabeledPoint> sample_uniform_labeled(const Network& net, const Rect& bounds,
                                                 std::size_t n, std::uint64_t seed);

/// Writes train.csv, test.csv, sampled.csv (x1,...,xd,label) and
/// manifest.json {seed, spec, sizes} into `dir` (created if missing).
void save_dataset(const Dataset& data, const std::string& dir);

/// Reads a directory written by save_dataset. Labels >= num_classes are a
/// ValidationError; malformed rows a ParseError naming the line.
Dataset load_dataset(const std::string& dir, std::size_t num_classes = 2);

/// Parses one CSV split; exposed for tests.
std::vector<LabeledPoint> parse_points_csv(std::string_view text, std::size_t num_classes);
std::string points_to_csv(std::span<const LabeledPoint> points);

}  // namespace nnrepair
