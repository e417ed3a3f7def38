#include "nnrepair/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "nnrepair/error.hpp"
#include "nnrepair/repair.hpp"

namespace nnrepair {

double accuracy(const Network& net, std::span<const LabeledPoint> points) {
  return split_accuracy(net, "", points).rate();
}

SplitAccuracy SplitAccuracy::from_rate(std::string name, std::size_t size, double rate) {
  if (rate < 0.0 || rate > 1.0) {
    throw InvalidInputError("accuracy rate outside [0, 1]");
  }
  return {std::move(name), size, static_cast<std::size_t>(std::llround(rate * size))};
}

SplitAccuracy split_accuracy(const Network& net, std::string name,
                             std::span<const LabeledPoint> points) {
  if (points.empty()) {
    throw InvalidInputError("accuracy of an empty point set");
  }
  SplitAccuracy s{std::move(name), points.size(), 0};
  for (const auto& p : points) {
    if (net.decide(p.x) == p.label) {
      ++s.correct;
    }
  }
  return s;
}

double weighted_accuracy(std::span<const SplitAccuracy> splits) {
  std::size_t total = 0;
  std::size_t correct = 0;
  for (const auto& s : splits) {
    if (s.correct > s.size) {
      throw InvalidInputError("split has more correct points than points");
    }
    total += s.size;
    correct += s.correct;
  }
  if (total == 0) {
    throw InvalidInputError("weighted accuracy over zero points");
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

AccuracyReport evaluate(const Network& net, const Dataset& data) {
  AccuracyReport report;
  const std::pair<const char*, const std::vector<LabeledPoint>*> parts[] = {
      {"train", &data.train}, {"test", &data.test}, {"sampled", &data.sampled}};
  for (const auto& [name, points] : parts) {
    if (!points->empty()) {
      report.splits.push_back(split_accuracy(net, name, *points));
    }
  }
  report.weighted = weighted_accuracy(report.splits);
  return report;
}

GroupBy parse_group_by(std::string_view text) {
  if (text == "threshold") {
    return GroupBy::kThreshold;
  }
  if (text == "heuristic") {
    return GroupBy::kHeuristic;
  }
  if (text == "size" || text == "selection_size") {
    return GroupBy::kSelectionSize;
  }
  throw ConfigError("unknown grouping '" + std::string(text) + "'");
}

std::vector<AggregateRow> aggregate_trials(std::span<const RepairTrial> trials, GroupBy by,
                                           std::optional<double> accuracy_before) {
  struct Group {
    std::vector<double> accuracies;
    std::vector<double> times;
    AggregateRow row;
  };
  // Numeric keys sort by value, text keys alphabetically.
  std::map<std::pair<std::size_t, std::string>, Group> groups;
  for (const auto& t : trials) {
    std::pair<std::size_t, std::string> key;
    switch (by) {
      case GroupBy::kThreshold:
        key = {t.threshold, t.soft_count ? std::to_string(t.threshold) + "/" +
                                               std::to_string(t.soft_count)
                                         : std::to_string(t.threshold)};
        break;
      case GroupBy::kHeuristic:
        key = {0, t.heuristic};
        break;
      case GroupBy::kSelectionSize:
        key = {t.selection.size(), std::to_string(t.selection.size())};
        break;
    }
    Group& g = groups[key];
    g.row.key = key.second;
    ++g.row.trials;
    g.times.push_back(t.solver_time_s);
    if (t.skipped) {
      ++g.row.skipped;
      continue;
    }
    switch (t.status) {
      case smt::SolverStatus::kSat:
        ++g.row.sat;
        if (t.accuracy) {
          g.accuracies.push_back(*t.accuracy);
        }
        break;
      case smt::SolverStatus::kUnsat:
        ++g.row.unsat;
        break;
      case smt::SolverStatus::kTimeout:
        ++g.row.timeout;
        break;
      default:
        ++g.row.other;
        break;
    }
  }

  std::vector<AggregateRow> rows;
  for (auto& [key, g] : groups) {
    AggregateRow row = g.row;
    row.accuracy_before = accuracy_before;
    std::sort(g.times.begin(), g.times.end());
    for (double s : g.times) {
      row.solver_time_s += s;
    }
    if (!g.accuracies.empty()) {
      std::sort(g.accuracies.begin(), g.accuracies.end());
      double sum = 0.0;
      for (double a : g.accuracies) {
        sum += a;
      }
      row.min_accuracy = g.accuracies.front();
      row.max_accuracy = g.accuracies.back();
      row.avg_accuracy = sum / static_cast<double>(g.accuracies.size());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace nnrepair
