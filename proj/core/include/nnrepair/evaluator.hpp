#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnrepair/datagen.hpp"
#include "nnrepair/network.hpp"

namespace nnrepair {

struct RepairTrial;

/// Fraction of points whose decide() matches the label. Empty input is an
/// InvalidInputError.
double accuracy(const Network& net, std::span<const LabeledPoint> points);

struct SplitAccuracy {
  std::string name;
  std::size_t size = 0;
  std::size_t correct = 0;

  double rate() const { return size == 0 ? 0.0 : static_cast<double>(correct) / size; }
  /// Recovers the integer count from a rounded rate, rounding to nearest.
  static SplitAccuracy from_rate(std::string name, std::size_t size, double rate);
};

SplitAccuracy split_accuracy(const Network& net, std::string name,
                             std::span<const LabeledPoint> points);

/// Size-weighted mean, sum(correct) / sum(size), computed on integer counts.
double weighted_accuracy(std::span<const SplitAccuracy> splits);

struct AccuracyReport {
  std::vector<SplitAccuracy> splits;
  double weighted = 0.0;
};

/// Train, test and (when present) sampled splits, weighted by size.
AccuracyReport evaluate(const Network& net, const Dataset& data);

enum class GroupBy { kThreshold, kHeuristic, kSelectionSize };
GroupBy parse_group_by(std::string_view text);

/// One row of a summary table.
struct AggregateRow {
  std::string key;
  std::optional<double> accuracy_before;
  std::optional<double> max_accuracy;
  std::optional<double> min_accuracy;
  std::optional<double> avg_accuracy;
  std::size_t trials = 0;
  std::size_t sat = 0;
  std::size_t unsat = 0;
  std::size_t timeout = 0;
  std::size_t skipped = 0;
  std::size_t other = 0;
  double solver_time_s = 0.0;
};

/// Groups trial records; accuracy columns are empty when a group has no SAT
/// trial. Rows are ordered by key (numerically for thresholds and sizes) and
/// do not depend on record order.
std::vector<AggregateRow> aggregate_trials(std::span<const RepairTrial> trials, GroupBy by,
                                           std::optional<double> accuracy_before);

}  // namespace nnrepair
