#include "nnrepair/heuristics.hpp"

#include <algorithm>
#include <random>

#include <json.hpp>

#include "nnrepair/error.hpp"

namespace nnrepair {

using nlohmann::json;

namespace {

std::vector<Rational> exact_point(std::span<const double> x) {
  return decimals_from_doubles(x);
}

std::string indicator(std::size_t i) { return "s_" + std::to_string(i); }

json rect_json(const Rect& r) { return {{"lo", r.lo}, {"hi", r.hi}}; }

}  // namespace

std::vector<LabeledPoint> choose_points(std::span<const LabeledPoint> pool, std::size_t n,
                                        std::uint64_t seed) {
  if (n > pool.size()) {
    throw ConfigError("asked for " + std::to_string(n) + " points from a pool of " +
                      std::to_string(pool.size()));
  }
  std::vector<LabeledPoint> out;
  out.reserve(n);
  std::mt19937_64 rng(seed);
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), n, rng);
  return out;
}

std::size_t majority_label(std::span<const std::size_t> labels, std::size_t num_classes) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (std::size_t l : labels) {
    if (l >= num_classes) {
      throw InvalidInputError("label out of range in majority vote");
    }
    ++counts[l];
  }
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

SoftConstraintSet heuristic_samples(const Network& net, std::span<const LabeledPoint> data,
                                    const SamplesConfig& config) {
  if (config.size == 0) {
    throw ConfigError("samples heuristic needs size >= 1");
  }
  const auto chosen = choose_points(data, config.size, config.seed);
  SoftConstraintSet set;
  set.heuristic = HeuristicKind::kSamples;
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    const auto& p = chosen[i];
    if (p.x.size() != net.input_dim() || p.label >= net.output_dim()) {
      throw InvalidInputError("sample point does not fit the network");
    }
    set.constraints.push_back({indicator(i), {{exact_point(p.x), p.label}}});
  }
  set.provenance = json{{"heuristic", "samples"},
                        {"size", config.size},
                        {"seed", config.seed},
                        {"pool", data.size()}}
                       .dump();
  return set;
}

SoftConstraintSet heuristic_grid(const Network& net, const GridConfig& config) {
  if (config.samples_per_cell == 0) {
    throw ConfigError("grid heuristic needs samples_per_cell >= 1");
  }
  if (config.rect.dim() != net.input_dim()) {
    throw InvalidInputError("grid rectangle dimension does not match the network");
  }
  const auto cells = grid_cells(config.rect, config.cells_per_axis);
  std::mt19937_64 rng(config.seed);
  SoftConstraintSet set;
  set.heuristic = HeuristicKind::kGrid;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Rect& cell = cells[c];
    std::vector<std::vector<double>> pts;
    std::vector<std::size_t> votes;
    for (std::size_t s = 0; s < config.samples_per_cell; ++s) {
      std::vector<double> x(cell.dim());
      for (std::size_t a = 0; a < cell.dim(); ++a) {
        std::uniform_real_distribution<double> u(cell.lo[a], cell.hi[a]);
        x[a] = u(rng);
      }
      votes.push_back(net.decide(x));
      pts.push_back(std::move(x));
    }
    const std::size_t label = majority_label(votes, net.output_dim());
    SoftConstraint sc{indicator(c), {}};
    for (const auto& x : pts) {
      sc.anchors.push_back({exact_point(x), label});
    }
    set.constraints.push_back(std::move(sc));
  }
  set.provenance = json{{"heuristic", "grid"},
                        {"rect", rect_json(config.rect)},
                        {"cells_per_axis", config.cells_per_axis},
                        {"samples_per_cell", config.samples_per_cell},
                        {"seed", config.seed}}
                       .dump();
  return set;
}

SoftConstraintSet heuristic_voronoi(const Network& net, const VoronoiConfig& config) {
  if (net.input_dim() != 2) {
    throw InvalidInputError("Voronoi heuristic needs a two-input network");
  }
  if (config.generators.size() < 2) {
    throw ConfigError("Voronoi heuristic needs at least two generators");
  }
  const VoronoiDiagram diagram = voronoi_cells(config.generators, config.clip);
  SoftConstraintSet set;
  set.heuristic = HeuristicKind::kVoronoi;
  if (diagram.duplicates_removed > 0) {
    set.warnings.push_back("removed " + std::to_string(diagram.duplicates_removed) +
                           " duplicate Voronoi generators");
  }
  for (std::size_t k = 0; k < diagram.cells.size(); ++k) {
    const Point2& g = diagram.generators[k];
    const std::size_t label = net.decide(g);
    SoftConstraint sc{indicator(k), {}};
    sc.anchors.push_back({exact_point(g), label});
    for (const auto& v : diagram.cells[k].polygon) {
      sc.anchors.push_back({exact_point(v), label});
    }
    set.constraints.push_back(std::move(sc));
  }
  set.provenance = json{{"heuristic", "voronoi"},
                        {"generators", config.generators.size()},
                        {"unique_generators", diagram.generators.size()},
                        {"clip", rect_json(config.clip)}}
                       .dump();
  return set;
}

}  // namespace nnrepair
