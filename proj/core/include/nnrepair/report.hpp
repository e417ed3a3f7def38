#pragma once

#include <optional>
#include <span>
#include <string>

#include "nnrepair/evaluator.hpp"

namespace nnrepair {

/// Accuracy as a percentage with five decimals ("99.50847"), or "NA".
std::string format_percent(std::optional<double> fraction);

/// Columns: group, accuracy_before, max_accuracy, min_accuracy,
/// avg_accuracy, trials, sat, unsat, timeout, skipped, other,
/// solver_time_s. Accuracies are percentages.
std::string aggregate_to_csv(std::span<const AggregateRow> rows, std::string_view group_name);

/// One row per property set: best repaired accuracy of the search and of the
/// retraining baseline.
struct CompareRow {
  std::string label;
  std::optional<double> accuracy_before;
  std::optional<double> repair_accuracy;
  std::optional<double> baseline_accuracy;
  std::optional<std::size_t> baseline_iterations;
};

std::string compare_to_csv(std::span<const CompareRow> rows);

}  // namespace nnrepair
