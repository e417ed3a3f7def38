#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "nnrepair/datagen.hpp"
#include "nnrepair/encoder.hpp"
#include "nnrepair/network.hpp"
#include "nnrepair/smt/solver.hpp"

namespace nnrepair {

/// Outcome of one solver query for one selection and threshold.
struct RepairTrial {
  WeightSelection selection;
  /// 0 when no soft constraints were used.
  std::size_t threshold = 0;
  std::size_t soft_count = 0;
  std::string heuristic = "none";
  smt::SolverStatus status = smt::SolverStatus::kUnknown;
  /// Not run because a lower threshold for the same selection was not SAT.
  bool skipped = false;
  std::optional<Assignment> weight_values;
  /// Weighted accuracy of the repaired network, SAT only.
  std::optional<double> accuracy;
  /// Indicators the model set to true, SAT with soft constraints only.
  std::optional<std::size_t> soft_satisfied;
  double solver_time_s = 0.0;
  double verify_time_s = 0.0;
  std::string message;
};

/// Everything a trial needs besides the selection.
struct RepairProblem {
  Network network;
  std::vector<RobustnessProperty> properties;
  std::optional<SoftConstraintSet> soft;
  /// Accuracy of candidates is measured on these splits.
  Dataset evaluation;
};

struct RepairConfig {
  std::size_t max_combination_size = 1;
  double trial_timeout_s = 600.0;
  double global_timeout_s = 36000.0;
  /// Ignored without soft constraints.
  std::vector<std::size_t> thresholds{1};
  WeightFilter weight_filter;
  /// Pairs are drawn only from the k best SAT singletons.
  std::optional<std::size_t> top_k_for_greedy;
  std::size_t jobs = 1;
  /// Run the search even when every property already holds.
  bool repair_satisfied = false;
  smt::SolverOptions solver;

  void validate(std::optional<std::size_t> soft_count) const;
};

struct SearchState {
  std::vector<RepairTrial> trials;
  /// Selections proven impossible; supersets are never tried.
  std::set<WeightSelection> unsat_marks;
  std::optional<RepairTrial> best;
  bool already_safe = false;
  bool timed_out = false;
  double elapsed_s = 0.0;
  std::vector<std::string> notes;
};

/// "Better" for picking the best trial: higher accuracy, then fewer free
/// weights, then a lower threshold.
bool better_trial(const RepairTrial& a, const RepairTrial& b);

/// Selections of `size` parameters from `candidates` that contain no marked
/// selection, in lexicographic order. With top_k and size 2 the pool is the
/// top-k SAT singletons in `state`.
std::vector<WeightSelection> build_eligible_combinations(const SearchState& state,
                                                         std::size_t size,
                                                         std::span<const WeightId> candidates,
                                                         std::optional<std::size_t> top_k = {});

/// One solver query. A SAT model is substituted and every property is
/// re-verified; a failed re-check turns the trial into ERROR.
RepairTrial run_trial(const RepairProblem& problem, const WeightSelection& selection,
                      std::size_t threshold, const smt::SolverOptions& options);

/// Runs thresholds in ascending order; after the first non-SAT the rest are
/// recorded as skipped.
std::vector<RepairTrial> threshold_ladder(const RepairProblem& problem,
                                          const WeightSelection& selection,
                                          std::span<const std::size_t> thresholds,
                                          const smt::SolverOptions& options);

/// Iterative search over growing selections.
SearchState greedy_repair(const RepairProblem& problem, const RepairConfig& config);

/// Trial log (one row per trial) and its reader.
std::string trials_to_csv(std::span<const RepairTrial> trials);
std::vector<RepairTrial> trials_from_csv(std::string_view text);

/// "w_1_0_0=1/2;b_2_1=-3.5"
std::string format_assignment(const Assignment& a);
Assignment parse_assignment(std::string_view text);

}  // namespace nnrepair
