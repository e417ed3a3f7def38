#pragma once

#include <span>
#include <string>

#include "nnrepair/datagen.hpp"
#include "nnrepair/encoder.hpp"
#include "nnrepair/network.hpp"

namespace nnrepair {

struct PlotOptions {
  /// Raster cells per axis; at least 16.
  std::size_t resolution = 200;
  /// Drawn size in pixels.
  double width_px = 600.0;
  /// Draw L1 balls as their bounding squares instead of diamonds.
  bool l1_as_square = false;
  /// Training points are circles, test points triangles, sampled squares.
  std::span<const LabeledPoint> train;
  std::span<const LabeledPoint> test;
  std::span<const LabeledPoint> sampled;
  std::span<const RobustnessProperty> properties;
};

/// Decision regions of a two-input network over `bounds`, shaded by the
/// softmax margin, with optional point and property overlays. Output is
/// byte-identical for identical inputs.
std::string boundary_svg(const Network& net, const Rect& bounds, const PlotOptions& options);

}  // namespace nnrepair
