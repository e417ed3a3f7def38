#include "nnrepair/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "nnrepair/error.hpp"

namespace nnrepair {

namespace {

void check_rect(const Rect& rect) {
  if (rect.lo.size() != rect.hi.size() || rect.lo.empty()) {
    throw InvalidInputError("rectangle bounds have mismatched dimensions");
  }
  for (std::size_t i = 0; i < rect.dim(); ++i) {
    if (!(rect.lo[i] < rect.hi[i]) || !std::isfinite(rect.lo[i]) || !std::isfinite(rect.hi[i])) {
      throw InvalidInputError("degenerate rectangle");
    }
  }
}

}  // namespace

double grid_edge(double lo, double hi, std::size_t n, std::size_t i) {
  if (i == 0) {
    return lo;
  }
  if (i >= n) {
    return hi;
  }
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
}

std::vector<Rect> grid_cells(const Rect& rect, std::size_t n) {
  check_rect(rect);
  if (n == 0) {
    throw ConfigError("cells_per_axis must be positive");
  }
  const std::size_t d = rect.dim();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    total *= n;
  }
  std::vector<Rect> cells;
  cells.reserve(total);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t k = 0; k < total; ++k) {
    Rect cell{std::vector<double>(d), std::vector<double>(d)};
    for (std::size_t a = 0; a < d; ++a) {
      cell.lo[a] = grid_edge(rect.lo[a], rect.hi[a], n, idx[a]);
      cell.hi[a] = grid_edge(rect.lo[a], rect.hi[a], n, idx[a] + 1);
    }
    cells.push_back(std::move(cell));
    for (std::size_t a = d; a-- > 0;) {
      if (++idx[a] < n) {
        break;
      }
      idx[a] = 0;
    }
  }
  return cells;
}

std::size_t grid_cell_index(const Rect& rect, std::size_t n, std::span<const double> x) {
  check_rect(rect);
  if (x.size() != rect.dim()) {
    throw InvalidInputError("point dimension does not match rectangle");
  }
  if (!rect.contains(x)) {
    throw InvalidInputError("point outside the grid rectangle");
  }
  std::size_t index = 0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    // Start from the arithmetic guess, then settle against the exact edges.
    const double t = (x[a] - rect.lo[a]) / (rect.hi[a] - rect.lo[a]);
    std::size_t i = std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::max(0.0, t * n)));
    while (i > 0 && x[a] < grid_edge(rect.lo[a], rect.hi[a], n, i)) {
      --i;
    }
    while (i + 1 < n && x[a] >= grid_edge(rect.lo[a], rect.hi[a], n, i + 1)) {
      ++i;
    }
    index = index * n + i;
  }
  return index;
}

bool VoronoiCell::contains(const Point2& x, double tolerance) const {
  for (const auto& h : halfplanes) {
    if (h.slack(x) < -tolerance) {
      return false;
    }
  }
  return true;
}

std::vector<Point2> clip_polygon(std::span<const Point2> polygon, const HalfPlane& h) {
  std::vector<Point2> out;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a = polygon[i];
    const Point2& b = polygon[(i + 1) % n];
    const double sa = h.slack(a);
    const double sb = h.slack(b);
    if (sa >= 0) {
      out.push_back(a);
    }
    if ((sa >= 0) != (sb >= 0)) {
      const double t = sa / (sa - sb);
      out.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
    }
  }
  // Drop consecutive duplicates produced when an edge touches the line.
  std::vector<Point2> cleaned;
  for (const auto& p : out) {
    if (cleaned.empty() || cleaned.back() != p) {
      cleaned.push_back(p);
    }
  }
  if (cleaned.size() > 1 && cleaned.front() == cleaned.back()) {
    cleaned.pop_back();
  }
  return cleaned;
}

double polygon_area(std::span<const Point2> polygon) {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Point2& a = polygon[i];
    const Point2& b = polygon[(i + 1) % polygon.size()];
    twice += a[0] * b[1] - b[0] * a[1];
  }
  return 0.5 * twice;
}

VoronoiDiagram voronoi_cells(std::span<const Point2> generators, const Rect& clip) {
  check_rect(clip);
  if (clip.dim() != 2) {
    throw InvalidInputError("Voronoi cells are only supported in two dimensions");
  }
  if (generators.empty()) {
    throw ConfigError("Voronoi heuristic needs at least one generator");
  }
  VoronoiDiagram diagram;
  std::map<Point2, std::size_t> seen;
  for (const auto& g : generators) {
    if (!clip.contains(std::span<const double>(g.data(), 2))) {
      throw InvalidInputError("Voronoi generator outside the clipping rectangle");
    }
    auto [it, inserted] = seen.emplace(g, diagram.generators.size());
    if (inserted) {
      diagram.generators.push_back(g);
    } else {
      ++diagram.duplicates_removed;
    }
    diagram.input_to_unique.push_back(it->second);
  }

  const std::vector<Point2> box{{clip.lo[0], clip.lo[1]},
                                {clip.hi[0], clip.lo[1]},
                                {clip.hi[0], clip.hi[1]},
                                {clip.lo[0], clip.hi[1]}};
  const auto& gens = diagram.generators;
  for (std::size_t k = 0; k < gens.size(); ++k) {
    VoronoiCell cell;
    cell.generator = k;
    cell.polygon = box;
    const Point2& pk = gens[k];
    for (std::size_t j = 0; j < gens.size(); ++j) {
      if (j == k) {
        continue;
      }
      const Point2& pj = gens[j];
      HalfPlane h;
      h.normal = {2 * (pj[0] - pk[0]), 2 * (pj[1] - pk[1])};
      h.offset = (pj[0] * pj[0] + pj[1] * pj[1]) - (pk[0] * pk[0] + pk[1] * pk[1]);
      cell.halfplanes.push_back(h);
      if (!cell.polygon.empty()) {
        cell.polygon = clip_polygon(cell.polygon, h);
      }
    }
    diagram.cells.push_back(std::move(cell));
  }
  return diagram;
}

}  // namespace nnrepair
