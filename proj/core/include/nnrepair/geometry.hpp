#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "nnrepair/datagen.hpp"

namespace nnrepair {

using Point2 = std::array<double, 2>;

/// Edge `i` of `n` equal divisions of [lo, hi]; edge 0 is lo and edge n is
/// hi exactly, so neighbouring cells share bit-identical boundaries.
double grid_edge(double lo, double hi, std::size_t n, std::size_t i);

/// Partition of `rect` into n^d cells, row-major with the last axis fastest.
std::vector<Rect> grid_cells(const Rect& rect, std::size_t n);

/// Index of the cell that owns `x` under half-open [lo, hi) membership (the
/// upper edge of the rectangle belongs to the last cell). Points outside the
/// rectangle are an InvalidInputError.
std::size_t grid_cell_index(const Rect& rect, std::size_t n, std::span<const double> x);

/// normal . x <= offset
struct HalfPlane {
  Point2 normal{};
  double offset = 0.0;

  double slack(const Point2& x) const {
    return offset - (normal[0] * x[0] + normal[1] * x[1]);
  }
};

struct VoronoiCell {
  /// Index into the deduplicated generator list.
  std::size_t generator = 0;
  /// One bisector half-plane per other generator:
  /// 2(p_j - p_k) . x <= |p_j|^2 - |p_k|^2.
  std::vector<HalfPlane> halfplanes;
  /// Counter-clockwise vertices of the cell clipped to the rectangle.
  std::vector<Point2> polygon;

  bool contains(const Point2& x, double tolerance = 0.0) const;
};

struct VoronoiDiagram {
  std::vector<Point2> generators;
  /// For each input generator, its index in `generators`.
  std::vector<std::size_t> input_to_unique;
  std::vector<VoronoiCell> cells;
  std::size_t duplicates_removed = 0;
};

/// Voronoi cells of the generators, clipped to a 2-D rectangle. Duplicate
/// generators are merged. Every generator must lie inside the rectangle.
VoronoiDiagram voronoi_cells(std::span<const Point2> generators, const Rect& clip);

/// Clips a convex polygon by one half-plane.
std::vector<Point2> clip_polygon(std::span<const Point2> polygon, const HalfPlane& h);

/// Shoelace area of a simple polygon.
double polygon_area(std::span<const Point2> polygon);

}  // namespace nnrepair
