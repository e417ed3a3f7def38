#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "nnrepair/error.hpp"
#include "nnrepair/evaluator.hpp"
#include "nnrepair/repair.hpp"
#include "nnrepair/report.hpp"
#include "test_support.hpp"

namespace nnrepair {
namespace {

// Class 1 exactly when x1 > 0.
Network sign_net() {
  LayerParams hidden{1, 2, {Rational(1), Rational(0)}, {Rational(0)}};
  LayerParams out{2, 1, {Rational(0), Rational(1)}, {Rational(0), Rational(0)}};
  return Network({hidden, out});
}

TEST(Evaluator, Accuracy) {
  const std::vector<LabeledPoint> pts{{{1, 0}, 1}, {{-1, 0}, 0}, {{2, 0}, 0}, {{0, 5}, 0}};
  EXPECT_DOUBLE_EQ(accuracy(sign_net(), pts), 0.75);
  EXPECT_THROW(accuracy(sign_net(), std::vector<LabeledPoint>{}), InvalidInputError);
  const auto s = split_accuracy(sign_net(), "train", pts);
  EXPECT_EQ(s.size, 4u);
  EXPECT_EQ(s.correct, 3u);
}

TEST(Evaluator, WeightedAccuracyFromRoundedRates) {
  const std::vector<SplitAccuracy> splits{SplitAccuracy::from_rate("train", 1562, 0.99743),
                                          SplitAccuracy::from_rate("test", 1600, 0.99125),
                                          SplitAccuracy::from_rate("sampled", 500, 1.0)};
  EXPECT_EQ(splits[0].correct, 1558u);
  EXPECT_EQ(splits[1].correct, 1586u);
  EXPECT_EQ(splits[2].correct, 500u);
  const double w = weighted_accuracy(splits);
  EXPECT_DOUBLE_EQ(w, 3644.0 / 3662.0);
  EXPECT_NEAR(w, 0.995085, 5e-7);
  EXPECT_EQ(format_percent(w), "99.50847");
}

TEST(Evaluator, EvaluateSkipsEmptySplits) {
  Dataset d;
  d.train = {{{1, 0}, 1}, {{-1, 0}, 0}};
  d.test = {{{1, 0}, 0}};
  const auto r = evaluate(sign_net(), d);
  EXPECT_EQ(r.splits.size(), 2u);
  EXPECT_DOUBLE_EQ(r.weighted, 2.0 / 3.0);
  EXPECT_THROW(evaluate(sign_net(), Dataset{}), InvalidInputError);
}

RepairTrial trial(std::size_t k, smt::SolverStatus s, std::optional<double> acc, double time,
                  bool skipped = false) {
  RepairTrial t;
  t.selection = WeightSelection{WeightId::bias(2, 0)};
  t.threshold = k;
  t.soft_count = 1562;
  t.heuristic = "samples";
  t.status = s;
  t.accuracy = acc;
  t.solver_time_s = time;
  t.skipped = skipped;
  return t;
}

std::vector<RepairTrial> sample_trials() {
  using S = smt::SolverStatus;
  return {trial(1, S::kSat, 0.8, 1.5),      trial(1, S::kSat, 0.6, 2.25),
          trial(1, S::kUnsat, {}, 0.1),     trial(325, S::kTimeout, {}, 3.0),
          trial(325, S::kSat, 0.7, 0.5),    trial(1500, S::kUnknown, {}, 0.0, true),
          trial(1500, S::kUnsat, {}, 0.3),  trial(1000, S::kError, {}, 0.2)};
}

TEST(Evaluator, AggregateByThreshold) {
  const auto rows = aggregate_trials(sample_trials(), GroupBy::kThreshold, 0.9950847);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].key, "1/1562");
  EXPECT_EQ(rows[1].key, "325/1562");
  EXPECT_EQ(rows[2].key, "1000/1562");
  EXPECT_EQ(rows[3].key, "1500/1562");
  EXPECT_EQ(rows[0].trials, 3u);
  EXPECT_EQ(rows[0].sat, 2u);
  EXPECT_EQ(rows[0].unsat, 1u);
  EXPECT_DOUBLE_EQ(*rows[0].max_accuracy, 0.8);
  EXPECT_DOUBLE_EQ(*rows[0].min_accuracy, 0.6);
  EXPECT_DOUBLE_EQ(*rows[0].avg_accuracy, 0.7);
  EXPECT_DOUBLE_EQ(rows[0].solver_time_s, 3.85);
  EXPECT_EQ(rows[1].timeout, 1u);
  EXPECT_EQ(rows[2].other, 1u);
  EXPECT_EQ(rows[3].skipped, 1u);
  EXPECT_FALSE(rows[3].max_accuracy.has_value());

  const auto csv = aggregate_to_csv(rows, "threshold");
  EXPECT_NE(csv.find("1500/1562,99.50847,NA,NA,NA,2,0,1,0,1,0,0.300"), std::string::npos) << csv;
  EXPECT_NE(csv.find("1/1562,99.50847,80.00000,60.00000,70.00000,3,2,1,0,0,0,3.850"),
            std::string::npos)
      << csv;
}

TEST(Evaluator, AggregateIsOrderInvariant) {
  auto trials = sample_trials();
  const auto ref = aggregate_to_csv(aggregate_trials(trials, GroupBy::kThreshold, 0.99), "k");
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(trials.begin(), trials.end(), rng);
    EXPECT_EQ(aggregate_to_csv(aggregate_trials(trials, GroupBy::kThreshold, 0.99), "k"), ref);
  }
}

TEST(Evaluator, AggregateByHeuristicAndSize) {
  auto trials = sample_trials();
  trials[0].heuristic = "grid";
  trials[1].selection = WeightSelection{WeightId::bias(2, 0), WeightId::bias(2, 1)};
  const auto h = aggregate_trials(trials, GroupBy::kHeuristic, std::nullopt);
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h[0].key, "grid");
  EXPECT_EQ(h[1].trials, 7u);
  const auto s = aggregate_trials(trials, GroupBy::kSelectionSize, std::nullopt);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].key, "2");
  EXPECT_EQ(parse_group_by("size"), GroupBy::kSelectionSize);
  EXPECT_THROW(parse_group_by("color"), ConfigError);
}

TEST(Report, CompareCsv) {
  const std::vector<CompareRow> rows{{"p1", 0.9950847, 0.9926270, 0.61, 20},
                                     {"p2", 0.99, std::nullopt, 0.5, std::nullopt}};
  const auto csv = compare_to_csv(rows);
  EXPECT_NE(csv.find("p1,99.50847,99.26270,61.00000,20"), std::string::npos) << csv;
  EXPECT_NE(csv.find("p2,99.00000,NA,50.00000,NA"), std::string::npos) << csv;
}

}  // namespace
}  // namespace nnrepair
