#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nnrepair/datagen.hpp"
#include "nnrepair/encoder.hpp"
#include "nnrepair/geometry.hpp"
#include "nnrepair/network.hpp"

namespace nnrepair {

/// One soft constraint per data point, each anchored at the point with its
/// ground-truth label. `size` points are drawn without replacement.
struct SamplesConfig {
  std::size_t size = 0;
  std::uint64_t seed = 0;
};

SoftConstraintSet heuristic_samples(const Network& net, std::span<const LabeledPoint> data,
                                    const SamplesConfig& config);

/// The rectangle is split into cells_per_axis^d cells; each cell gets
/// `samples_per_cell` uniform interior points labelled by the majority vote
/// (ties to the lowest class) of the original network over those points.
struct GridConfig {
  Rect rect;
  std::size_t cells_per_axis = 10;
  std::size_t samples_per_cell = 3;
  std::uint64_t seed = 0;
};

SoftConstraintSet heuristic_grid(const Network& net, const GridConfig& config);

/// Cells around each generator, clipped to `clip`. Each constraint pins the
/// generator and every vertex of its clipped cell to the generator's class
/// under the original network.
struct VoronoiConfig {
  std::vector<Point2> generators;
  Rect clip;
};

SoftConstraintSet heuristic_voronoi(const Network& net, const VoronoiConfig& config);

/// Picks `n` distinct points from `pool` (seeded, order preserved).
std::vector<LabeledPoint> choose_points(std::span<const LabeledPoint> pool, std::size_t n,
                                        std::uint64_t seed);

/// Majority label with ties going to the lowest class.
std::size_t majority_label(std::span<const std::size_t> labels, std::size_t num_classes);

}  // namespace nnrepair
