#include "nnrepair/repair.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <thread>

#include "csv_detail.hpp"
#include "nnrepair/error.hpp"
#include "nnrepair/evaluator.hpp"

namespace nnrepair {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string archive_name(const WeightSelection& sel, std::size_t threshold) {
  std::string name = "repair";
  for (const auto& id : sel.ids()) {
    name += "_" + id.name();
  }
  return name + "_k" + std::to_string(threshold);
}

bool has_marked_subset(const std::set<WeightSelection>& marks, const WeightSelection& sel) {
  for (const auto& m : marks) {
    if (m.is_subset_of(sel)) {
      return true;
    }
  }
  return false;
}

void for_each_combination(std::span<const WeightId> pool, std::size_t k,
                          const std::function<void(const std::vector<WeightId>&)>& visit) {
  const std::size_t n = pool.size();
  if (k == 0 || k > n) {
    return;
  }
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) {
    idx[i] = i;
  }
  std::vector<WeightId> ids(k);
  for (;;) {
    for (std::size_t i = 0; i < k; ++i) {
      ids[i] = pool[idx[i]];
    }
    visit(ids);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) {
      --i;
    }
    if (i == 0) {
      return;
    }
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) {
      idx[j] = idx[j - 1] + 1;
    }
  }
}

RepairTrial error_trial(const RepairProblem& problem, const WeightSelection& sel,
                        std::size_t threshold, std::string message) {
  RepairTrial t;
  t.selection = sel;
  t.threshold = problem.soft ? threshold : 0;
  t.soft_count = problem.soft ? problem.soft->size() : 0;
  t.heuristic = problem.soft ? to_string(problem.soft->heuristic) : "none";
  t.status = smt::SolverStatus::kError;
  t.message = std::move(message);
  return t;
}

}  // namespace

void RepairConfig::validate(std::optional<std::size_t> soft_count) const {
  if (max_combination_size == 0) {
    throw ConfigError("max_combination_size must be at least 1");
  }
  if (trial_timeout_s <= 0) {
    throw ConfigError("trial timeout must be positive");
  }
  if (jobs == 0) {
    throw ConfigError("jobs must be at least 1");
  }
  if (top_k_for_greedy && *top_k_for_greedy < 2) {
    throw ConfigError("top_k_for_greedy must be at least 2");
  }
  if (soft_count) {
    if (thresholds.empty()) {
      throw ConfigError("no thresholds given");
    }
    for (std::size_t k : thresholds) {
      if (k < 1 || k > *soft_count) {
        throw ConfigError("threshold " + std::to_string(k) + " outside [1, " +
                          std::to_string(*soft_count) + "]");
      }
    }
  }
}

bool better_trial(const RepairTrial& a, const RepairTrial& b) {
  const double aa = a.accuracy.value_or(-1.0);
  const double ba = b.accuracy.value_or(-1.0);
  if (aa != ba) {
    return aa > ba;
  }
  if (a.selection.size() != b.selection.size()) {
    return a.selection.size() < b.selection.size();
  }
  return a.threshold < b.threshold;
}

std::vector<WeightSelection> build_eligible_combinations(const SearchState& state,
                                                         std::size_t size,
                                                         std::span<const WeightId> candidates,
                                                         std::optional<std::size_t> top_k) {
  std::vector<WeightId> pool;
  if (top_k && size == 2) {
    std::map<WeightId, double> best;
    for (const auto& t : state.trials) {
      if (t.selection.size() == 1 && t.status == smt::SolverStatus::kSat && t.accuracy) {
        const WeightId& id = t.selection.ids().front();
        auto [it, inserted] = best.emplace(id, *t.accuracy);
        if (!inserted) {
          it->second = std::max(it->second, *t.accuracy);
        }
      }
    }
    std::vector<std::pair<WeightId, double>> ranked(best.begin(), best.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t i = 0; i < ranked.size() && i < *top_k; ++i) {
      pool.push_back(ranked[i].first);
    }
  } else {
    for (const auto& id : candidates) {
      if (!state.unsat_marks.contains(WeightSelection{id})) {
        pool.push_back(id);
      }
    }
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  std::set<WeightSelection> wide_marks;
  for (const auto& m : state.unsat_marks) {
    if (m.size() >= 2 && m.size() <= size) {
      wide_marks.insert(m);
    }
  }
  std::vector<WeightSelection> out;
  for_each_combination(pool, size, [&](const std::vector<WeightId>& ids) {
    WeightSelection sel(ids);
    if (size == 1 && state.unsat_marks.contains(sel)) {
      return;
    }
    if (!has_marked_subset(wide_marks, sel)) {
      out.push_back(std::move(sel));
    }
  });
  return out;
}

RepairTrial run_trial(const RepairProblem& problem, const WeightSelection& selection,
                      std::size_t threshold, const smt::SolverOptions& options) {
  RepairTrial t;
  t.selection = selection;
  const SoftConstraintSet* soft = nullptr;
  SoftConstraintSet with_k;
  if (problem.soft) {
    with_k = problem.soft->with_threshold(threshold);
    soft = &with_k;
    t.threshold = threshold;
    t.soft_count = with_k.size();
    t.heuristic = to_string(with_k.heuristic);
  }
  const smt::Script script =
      encode_repair(problem.network, selection, problem.properties, soft);
  const smt::SolverVerdict verdict =
      smt::run_solver(script, options, archive_name(selection, t.threshold));
  t.status = verdict.status;
  t.solver_time_s = verdict.wall_time_seconds;
  t.message = verdict.message;
  if (verdict.status != smt::SolverStatus::kSat) {
    return t;
  }

  const auto start = Clock::now();
  Assignment values;
  for (const auto& id : selection.ids()) {
    values[id] = verdict.model->at(id.name());
  }
  t.weight_values = values;
  const Network repaired = problem.network.substitute(values);

  auto downgrade = [&](std::string why) {
    t.status = smt::SolverStatus::kError;
    t.message = std::move(why);
    t.verify_time_s = seconds_since(start);
    return t;
  };

  if (soft != nullptr) {
    std::size_t on = 0;
    for (const auto& c : soft->constraints) {
      if (sgn(verdict.model->at(c.indicator_name)) == 0) {
        continue;
      }
      ++on;
      if (!soft_constraint_holds(repaired, c)) {
        return downgrade("model sets " + c.indicator_name +
                         " but the repaired network violates it");
      }
    }
    t.soft_satisfied = on;
    if (on < soft->threshold) {
      return downgrade("model satisfies only " + std::to_string(on) + " soft constraints");
    }
  }
  for (const auto& prop : problem.properties) {
    const VerificationResult v = verify_property(repaired, prop, options);
    if (v.status != PropertyStatus::kHolds) {
      return downgrade("re-verification of " + prop.name + " returned " + to_string(v.status));
    }
  }
  t.accuracy = evaluate(repaired, problem.evaluation).weighted;
  t.verify_time_s = seconds_since(start);
  return t;
}

std::vector<RepairTrial> threshold_ladder(const RepairProblem& problem,
                                          const WeightSelection& selection,
                                          std::span<const std::size_t> thresholds,
                                          const smt::SolverOptions& options) {
  std::vector<RepairTrial> out;
  if (!problem.soft) {
    out.push_back(run_trial(problem, selection, 0, options));
    return out;
  }
  std::vector<std::size_t> ladder(thresholds.begin(), thresholds.end());
  std::sort(ladder.begin(), ladder.end());
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());
  bool stop = false;
  for (std::size_t k : ladder) {
    if (stop) {
      RepairTrial s;
      s.selection = selection;
      s.threshold = k;
      s.soft_count = problem.soft->size();
      s.heuristic = to_string(problem.soft->heuristic);
      s.skipped = true;
      s.message = "lower threshold was not SAT";
      out.push_back(std::move(s));
      continue;
    }
    out.push_back(run_trial(problem, selection, k, options));
    stop = out.back().status != smt::SolverStatus::kSat;
  }
  return out;
}

SearchState greedy_repair(const RepairProblem& problem, const RepairConfig& config) {
  SearchState state;
  const auto start = Clock::now();
  if (config.global_timeout_s <= 0) {
    state.timed_out = true;
    return state;
  }
  config.validate(problem.soft ? std::optional<std::size_t>(problem.soft->size())
                               : std::nullopt);
  if (problem.properties.empty()) {
    throw ConfigError("repair needs at least one property");
  }
  const double deadline = config.global_timeout_s;
  auto options_for_now = [&]() {
    smt::SolverOptions o = config.solver;
    o.timeout_s = std::max(0.001, std::min(config.trial_timeout_s, deadline - seconds_since(start)));
    return o;
  };

  bool any_violated = false;
  for (const auto& prop : problem.properties) {
    const VerificationResult v = verify_property(problem.network, prop, options_for_now());
    if (v.status != PropertyStatus::kHolds) {
      any_violated = true;
      if (v.status == PropertyStatus::kInconclusive) {
        state.notes.push_back("initial check of " + prop.name + " was inconclusive: " +
                              v.verdict.message);
      }
    }
  }
  if (!any_violated && !config.repair_satisfied) {
    state.already_safe = true;
    RepairTrial identity;
    identity.status = smt::SolverStatus::kSat;
    identity.weight_values = Assignment{};
    identity.accuracy = evaluate(problem.network, problem.evaluation).weighted;
    identity.message = "all properties already hold";
    state.best = identity;
    state.elapsed_s = seconds_since(start);
    return state;
  }

  std::vector<std::size_t> thresholds = config.thresholds;
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  const std::vector<WeightId> candidates =
      problem.network.enumerate_weight_ids(config.weight_filter);
  const std::size_t max_size = std::min(config.max_combination_size, candidates.size());

  for (std::size_t size = 1; size <= max_size && !state.timed_out; ++size) {
    const auto combos =
        build_eligible_combinations(state, size, candidates, config.top_k_for_greedy);
    std::vector<std::optional<std::vector<RepairTrial>>> results(combos.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> out_of_time{false};
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= combos.size()) {
          return;
        }
        if (seconds_since(start) >= deadline) {
          out_of_time = true;
          return;
        }
        try {
          results[i] = threshold_ladder(problem, combos[i], thresholds, options_for_now());
        } catch (const std::exception& e) {
          results[i] = std::vector<RepairTrial>{
              error_trial(problem, combos[i], thresholds.front(), e.what())};
        }
      }
    };
    const std::size_t workers = std::min(config.jobs, std::max<std::size_t>(1, combos.size()));
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
      }
      for (auto& th : pool) {
        th.join();
      }
    }

    for (std::size_t i = 0; i < combos.size(); ++i) {
      if (!results[i]) {
        continue;
      }
      const auto& ladder = *results[i];
      const RepairTrial& first = ladder.front();
      if (first.status == smt::SolverStatus::kUnsat && first.threshold <= 1) {
        state.unsat_marks.insert(combos[i]);
      }
      for (const auto& t : ladder) {
        if (t.status == smt::SolverStatus::kSat && (!state.best || better_trial(t, *state.best))) {
          state.best = t;
        }
        state.trials.push_back(t);
      }
    }
    if (out_of_time || seconds_since(start) >= deadline) {
      state.timed_out = true;
    }
  }
  state.elapsed_s = seconds_since(start);
  return state;
}

std::string format_assignment(const Assignment& a) {
  std::string out;
  for (const auto& [id, v] : a) {
    if (!out.empty()) {
      out += ";";
    }
    out += id.name() + "=" + format_rational(v);
  }
  return out;
}

Assignment parse_assignment(std::string_view text) {
  Assignment a;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    const std::string_view item = text.substr(pos, end - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("assignment entry without '=': " + std::string(item));
    }
    a[WeightId::parse(item.substr(0, eq))] = parse_rational(item.substr(eq + 1));
    pos = end + 1;
  }
  return a;
}

namespace {

const std::vector<std::string> kTrialColumns{
    "selection",  "size",          "heuristic",     "threshold",     "soft_count",
    "status",     "skipped",       "accuracy",      "soft_satisfied", "solver_time_s",
    "verify_time_s", "weight_values", "message"};

}  // namespace

std::string trials_to_csv(std::span<const RepairTrial> trials) {
  std::string out = csv::row(kTrialColumns);
  for (const auto& t : trials) {
    out += csv::row({t.selection.to_string(),
                     std::to_string(t.selection.size()),
                     t.heuristic,
                     std::to_string(t.threshold),
                     std::to_string(t.soft_count),
                     t.skipped ? "SKIPPED" : smt::to_string(t.status),
                     t.skipped ? "1" : "0",
                     t.accuracy ? csv::number(*t.accuracy) : "",
                     t.soft_satisfied ? std::to_string(*t.soft_satisfied) : "",
                     csv::number(t.solver_time_s),
                     csv::number(t.verify_time_s),
                     t.weight_values ? format_assignment(*t.weight_values) : "",
                     t.message});
  }
  return out;
}

std::vector<RepairTrial> trials_from_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows.front() != kTrialColumns) {
    throw ParseError("trial log header does not match", 1);
  }
  std::vector<RepairTrial> trials;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r];
    const std::size_t line = r + 1;
    if (cells.size() != kTrialColumns.size()) {
      throw ParseError("trial log row has " + std::to_string(cells.size()) + " fields", line);
    }
    RepairTrial t;
    t.selection = WeightSelection::parse(cells[0]);
    t.heuristic = cells[2];
    t.threshold = static_cast<std::size_t>(csv::to_number(cells[3], line));
    t.soft_count = static_cast<std::size_t>(csv::to_number(cells[4], line));
    t.skipped = cells[6] == "1";
    t.status = t.skipped ? smt::SolverStatus::kUnknown : smt::parse_status(cells[5]);
    if (!cells[7].empty()) {
      t.accuracy = csv::to_number(cells[7], line);
    }
    if (!cells[8].empty()) {
      t.soft_satisfied = static_cast<std::size_t>(csv::to_number(cells[8], line));
    }
    t.solver_time_s = csv::to_number(cells[9], line);
    t.verify_time_s = csv::to_number(cells[10], line);
    if (!cells[11].empty() || t.status == smt::SolverStatus::kSat) {
      t.weight_values = parse_assignment(cells[11]);
    }
    t.message = cells[12];
    trials.push_back(std::move(t));
  }
  return trials;
}

}  // namespace nnrepair
