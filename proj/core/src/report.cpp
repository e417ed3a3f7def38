#include "nnrepair/report.hpp"

#include "csv_detail.hpp"

namespace nnrepair {

std::string format_percent(std::optional<double> fraction) {
  return fraction ? csv::fixed(*fraction * 100.0, 5) : "NA";
}

std::string aggregate_to_csv(std::span<const AggregateRow> rows, std::string_view group_name) {
  std::string out = csv::row({std::string(group_name), "accuracy_before", "max_accuracy",
                              "min_accuracy", "avg_accuracy", "trials", "sat", "unsat",
                              "timeout", "skipped", "other", "solver_time_s"});
  for (const auto& r : rows) {
    out += csv::row({r.key, format_percent(r.accuracy_before), format_percent(r.max_accuracy),
                     format_percent(r.min_accuracy), format_percent(r.avg_accuracy),
                     std::to_string(r.trials), std::to_string(r.sat), std::to_string(r.unsat),
                     std::to_string(r.timeout), std::to_string(r.skipped),
                     std::to_string(r.other), csv::fixed(r.solver_time_s, 3)});
  }
  return out;
}

std::string compare_to_csv(std::span<const CompareRow> rows) {
  std::string out = csv::row({"properties", "accuracy_before", "repair_accuracy",
                              "baseline_accuracy", "baseline_iterations"});
  for (const auto& r : rows) {
    out += csv::row({r.label, format_percent(r.accuracy_before),
                     format_percent(r.repair_accuracy), format_percent(r.baseline_accuracy),
                     r.baseline_iterations ? std::to_string(*r.baseline_iterations) : "NA"});
  }
  return out;
}

}  // namespace nnrepair
