#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "nnrepair/error.hpp"
#include "nnrepair/evaluator.hpp"
#include "nnrepair/repair.hpp"
#include "test_support.hpp"

namespace nnrepair {
namespace {

using smt::SolverStatus;
using testing::tiny_net;
using testing::make_property;
using testing::q;

WeightId w1(std::size_t col) { return WeightId::weight(1, 0, col); }

RepairTrial sat_single(const WeightId& id, double acc) {
  RepairTrial t;
  t.selection = WeightSelection{id};
  t.status = SolverStatus::kSat;
  t.accuracy = acc;
  return t;
}

TEST(Combinations, PairCounts) {
  SearchState s;
  const auto small = Network::zeros(std::vector<std::size_t>{2, 4, 2}).enumerate_weight_ids();
  EXPECT_EQ(build_eligible_combinations(s, 1, small).size(), 22u);
  EXPECT_EQ(build_eligible_combinations(s, 2, small).size(), 231u);
  const auto big = Network::zeros(std::vector<std::size_t>{2, 10, 10, 2}).enumerate_weight_ids();
  EXPECT_EQ(build_eligible_combinations(s, 2, big).size(), 13041u);
}

TEST(Combinations, UnsatSingletonPrunesPairs) {
  const std::vector<WeightId> ws{w1(0), w1(1), w1(2), w1(3)};
  SearchState s;
  s.unsat_marks.insert(WeightSelection{w1(3)});
  const auto pairs = build_eligible_combinations(s, 2, ws);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_EQ(pairs[0], (WeightSelection{w1(0), w1(1)}));
  EXPECT_EQ(pairs[1], (WeightSelection{w1(0), w1(2)}));
  EXPECT_EQ(pairs[2], (WeightSelection{w1(1), w1(2)}));
  EXPECT_EQ(build_eligible_combinations(s, 1, ws).size(), 3u);
}

TEST(Combinations, MarkedPairPrunesTriples) {
  const std::vector<WeightId> ws{w1(0), w1(1), w1(2), w1(3)};
  SearchState s;
  s.unsat_marks.insert(WeightSelection{w1(0), w1(1)});
  // C(4,3) = 4 triples, two of which contain {w0, w1}.
  EXPECT_EQ(build_eligible_combinations(s, 3, ws).size(), 2u);
  EXPECT_EQ(build_eligible_combinations(s, 2, ws).size(), 5u);
}

TEST(Combinations, TopKUsesBestSatSingletons) {
  const std::vector<WeightId> ws{w1(0), w1(1), w1(2), w1(3)};
  SearchState s;
  s.trials = {sat_single(w1(0), 0.5), sat_single(w1(1), 0.9), sat_single(w1(2), 0.8),
              sat_single(w1(3), 0.7)};
  const auto pairs = build_eligible_combinations(s, 2, ws, 2);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0], (WeightSelection{w1(1), w1(2)}));
  // Larger sizes ignore top_k.
  EXPECT_EQ(build_eligible_combinations(s, 3, ws, 2).size(), 4u);
}

TEST(Repair, BetterTrialOrdering) {
  RepairTrial a = sat_single(w1(0), 0.9);
  RepairTrial b = sat_single(w1(1), 0.8);
  EXPECT_TRUE(better_trial(a, b));
  b.accuracy = 0.9;
  b.selection = WeightSelection{w1(1), w1(2)};
  EXPECT_TRUE(better_trial(a, b));
  RepairTrial c = a;
  c.threshold = 5;
  EXPECT_TRUE(better_trial(a, c));
  EXPECT_FALSE(better_trial(c, a));
}

TEST(Repair, ConfigValidation) {
  RepairConfig c;
  EXPECT_NO_THROW(c.validate(std::nullopt));
  c.thresholds = {1, 11};
  EXPECT_THROW(c.validate(10), ConfigError);
  c.thresholds = {};
  EXPECT_THROW(c.validate(10), ConfigError);
  c = RepairConfig{};
  c.max_combination_size = 0;
  EXPECT_THROW(c.validate(std::nullopt), ConfigError);
}

TEST(Repair, AssignmentRoundTrip) {
  const Assignment a{{WeightId::weight(1, 0, 0), q("1/2")}, {WeightId::bias(2, 1), q("-3.5")}};
  EXPECT_EQ(format_assignment(a), "w_1_0_0=0.5;b_2_1=-3.5");
  EXPECT_EQ(parse_assignment(format_assignment(a)), a);
  const Assignment third{{WeightId::bias(1, 0), q("1/3")}};
  EXPECT_EQ(parse_assignment(format_assignment(third)), third);
  EXPECT_THROW(parse_assignment("w_1_0_0"), ParseError);
}

TEST(Repair, TrialCsvRoundTrip) {
  RepairTrial a = sat_single(w1(0), 0.75);
  a.weight_values = Assignment{{w1(0), q("-2/7")}};
  a.threshold = 3;
  a.soft_count = 10;
  a.heuristic = "samples";
  a.soft_satisfied = 4;
  a.message = "has, comma and \"quotes\"";
  RepairTrial b;
  b.selection = WeightSelection{w1(1), w1(2)};
  b.status = SolverStatus::kTimeout;
  RepairTrial c = b;
  c.skipped = true;
  const std::vector<RepairTrial> trials{a, b, c};
  const auto back = trials_from_csv(trials_to_csv(trials));
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].selection, a.selection);
  EXPECT_EQ(back[0].weight_values, a.weight_values);
  EXPECT_EQ(back[0].accuracy, a.accuracy);
  EXPECT_EQ(back[0].soft_satisfied, a.soft_satisfied);
  EXPECT_EQ(back[0].message, a.message);
  EXPECT_EQ(back[0].threshold, 3u);
  EXPECT_EQ(back[1].status, SolverStatus::kTimeout);
  EXPECT_FALSE(back[1].accuracy.has_value());
  EXPECT_TRUE(back[2].skipped);
  EXPECT_THROW(trials_from_csv("nope\n"), ParseError);
}

class RepairZ3 : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!testing::have_solver()) {
      GTEST_SKIP() << "z3 not available";
    }
  }

  // 2-1-2 net: n = relu(x1 + x2), out = (w21 n + b21, -n).
  static RepairProblem problem(std::size_t target) {
    RepairProblem p{tiny_net(1, 1, 0, 1, -1, 0, 0), {}, std::nullopt, {}};
    p.properties.push_back(make_property("p", {q("0.25"), q("0.25")}, q("0.25"), Norm::kLinf, target));
    p.evaluation.train = {{{0.25, 0.25}, 0}, {{2, 2}, 1}, {{-1, -1}, 0}, {{3, 0}, 1}};
    return p;
  }
};

// With w21 and b21 free, the ball (n in [0, 1]) needs (w21 + 1) n + b21 > 0.
// Anchors at larger n pin where class 1 begins: class 0 below some cut n* > 1
// and class 1 above it. Anchors: class 0 at n = 0.25; class 1 at n = 2 (three
// points); class 0 at n = 3 and 3.5; class 1 at n = 4. The best cut (n* < 2)
// satisfies 5 of 7.
SoftConstraintSet cut_anchors() {
  const std::vector<std::pair<std::vector<Rational>, std::size_t>> pts{
      {{q("0.25"), q("0")}, 0}, {{q("1"), q("1")}, 1},   {{q("0.5"), q("1.5")}, 1},
      {{q("2"), q("0")}, 1},    {{q("1.5"), q("1.5")}, 0}, {{q("1.75"), q("1.75")}, 0},
      {{q("2"), q("2")}, 1}};
  SoftConstraintSet s;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    s.constraints.push_back({"s_" + std::to_string(i), {Anchor{pts[i].first, pts[i].second}}});
  }
  return s;
}

TEST_F(RepairZ3, LadderSkipsAfterFirstUnsat) {
  RepairProblem p = problem(0);
  p.soft = cut_anchors();
  const auto log = std::filesystem::temp_directory_path() / "nnrepair_ladder_calls.log";
  std::filesystem::remove(log);
  smt::SolverOptions o = testing::solver_options();
  o.command = {"/bin/sh", "-c",
               "s=$(cat); case \"$s\" in *'(set-logic NRA)'*) echo call >> " + log.string() +
                   ";; esac; printf '%s\\n' \"$s\" | " + testing::z3_path() + " -in"};
  const WeightSelection free{WeightId::weight(2, 0, 0), WeightId::bias(2, 0)};
  const std::vector<std::size_t> ladder{7, 1, 5, 6};
  const auto trials = threshold_ladder(p, free, ladder, o);
  ASSERT_EQ(trials.size(), 4u);
  EXPECT_EQ(trials[0].threshold, 1u);
  EXPECT_EQ(trials[0].status, SolverStatus::kSat) << trials[0].message;
  EXPECT_EQ(trials[1].threshold, 5u);
  EXPECT_EQ(trials[1].status, SolverStatus::kSat) << trials[1].message;
  EXPECT_GE(*trials[1].soft_satisfied, 5u);
  EXPECT_EQ(trials[2].status, SolverStatus::kUnsat);
  EXPECT_FALSE(trials[2].skipped);
  EXPECT_TRUE(trials[3].skipped);
  EXPECT_EQ(trials[3].threshold, 7u);
  std::ifstream in(log);
  std::size_t calls = 0;
  for (std::string line; std::getline(in, line);) {
    ++calls;
  }
  EXPECT_EQ(calls, 3u);
}

TEST_F(RepairZ3, GlobalTimeoutZeroReturnsImmediately) {
  RepairConfig c;
  c.global_timeout_s = 0;
  c.solver = testing::solver_options();
  const auto s = greedy_repair(problem(1), c);
  EXPECT_TRUE(s.timed_out);
  EXPECT_TRUE(s.trials.empty());
  EXPECT_FALSE(s.best.has_value());
}

TEST_F(RepairZ3, AlreadySafeReturnsIdentity) {
  RepairConfig c;
  c.solver = testing::solver_options();
  const auto s = greedy_repair(problem(0), c);
  EXPECT_TRUE(s.already_safe);
  ASSERT_TRUE(s.best.has_value());
  EXPECT_TRUE(s.best->weight_values->empty());
  EXPECT_TRUE(s.trials.empty());
}

TEST_F(RepairZ3, SingletonSearchIsSound) {
  RepairConfig c;
  c.solver = testing::solver_options();
  const RepairProblem p = problem(1);
  const auto s = greedy_repair(p, c);
  EXPECT_FALSE(s.already_safe);
  EXPECT_EQ(s.trials.size(), 7u);
  std::size_t sat = 0;
  for (const auto& t : s.trials) {
    if (t.status == SolverStatus::kSat) {
      ++sat;
      const Network r = p.network.substitute(*t.weight_values);
      EXPECT_EQ(testing::dense_ball_misclassified(r, p.properties[0], 51), 0u) << t.selection.to_string();
    } else if (t.status == SolverStatus::kUnsat) {
      EXPECT_TRUE(s.unsat_marks.contains(t.selection));
    }
  }
  EXPECT_GT(sat, 0u);
  ASSERT_TRUE(s.best.has_value());
  for (const auto& t : s.trials) {
    if (t.status == SolverStatus::kSat) {
      EXPECT_FALSE(better_trial(t, *s.best));
    }
  }
}

TEST_F(RepairZ3, ParallelMatchesSerial) {
  RepairConfig c;
  c.solver = testing::solver_options();
  c.max_combination_size = 2;
  c.weight_filter.last_layer_only = true;
  const RepairProblem p = problem(1);
  const auto serial = greedy_repair(p, c);
  c.jobs = 3;
  const auto parallel = greedy_repair(p, c);
  ASSERT_EQ(serial.trials.size(), parallel.trials.size());
  for (std::size_t i = 0; i < serial.trials.size(); ++i) {
    EXPECT_EQ(serial.trials[i].selection, parallel.trials[i].selection);
    EXPECT_EQ(serial.trials[i].status, parallel.trials[i].status);
  }
  EXPECT_EQ(serial.unsat_marks, parallel.unsat_marks);
}

}  // namespace
}  // namespace nnrepair
