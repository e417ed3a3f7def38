#include <gtest/gtest.h>

#include "nnrepair/baseline.hpp"
#include "nnrepair/datagen.hpp"
#include "nnrepair/error.hpp"
#include "test_support.hpp"

namespace nnrepair {
namespace {

using testing::make_property;
using testing::q;

TEST(Baseline, SamplesLieInsideTheBall) {
  for (Norm norm : {Norm::kL1, Norm::kLinf}) {
    const auto p = make_property("b", {q("3"), q("-10")}, q("5"), norm, 1);
    const auto pts = sample_in_ball(p, 2000, 9);
    ASSERT_EQ(pts.size(), 2000u);
    double mean0 = 0.0;
    std::size_t outer = 0;
    for (const auto& x : pts) {
      EXPECT_TRUE(p.contains(std::span<const double>(x)));
      mean0 += x[0];
      const double r = norm == Norm::kL1 ? std::abs(x[0] - 3) + std::abs(x[1] + 10)
                                         : std::max(std::abs(x[0] - 3), std::abs(x[1] + 10));
      outer += r > 2.5 ? 1 : 0;
    }
    EXPECT_NEAR(mean0 / 2000.0, 3.0, 0.2);
    // Uniform in area: three quarters of the mass lies beyond half the radius.
    EXPECT_NEAR(static_cast<double>(outer) / 2000.0, 0.75, 0.04);
  }
  const auto p = make_property("b", {q("0"), q("0")}, q("1"), Norm::kL1, 0);
  EXPECT_EQ(sample_in_ball(p, 10, 1), sample_in_ball(p, 10, 1));
}

class BaselineZ3 : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!testing::have_solver()) {
      GTEST_SKIP() << "z3 not available";
    }
  }
};

TEST_F(BaselineZ3, AlreadySafeStopsAfterOneVerification) {
  const Network net = testing::tiny_net(1, 1, 0, 1, -1, 0, 0);
  const std::vector<RobustnessProperty> props{
      make_property("p", {q("0.25"), q("0.25")}, q("0.25"), Norm::kLinf, 0)};
  const std::vector<LabeledPoint> train{{{1, 1}, 0}};
  const auto r = naive_baseline(net, props, train, TrainConfig{}, BaselineOptions{},
                                testing::solver_options());
  EXPECT_TRUE(r.repaired);
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_EQ(r.verifications, 1u);
  EXPECT_EQ(r.network, net);
}

TEST_F(BaselineZ3, IterationCapIsRespected) {
  // Class 1 on the ball would need out1 > out0 = n, impossible for this net
  // to learn in one epoch from a tiny rate.
  const Network net = testing::tiny_net(1, 1, 0, 1, -1, 0, 0);
  const std::vector<RobustnessProperty> props{
      make_property("p", {q("5"), q("5")}, q("1"), Norm::kLinf, 1)};
  const std::vector<LabeledPoint> train{{{5, 5}, 0}};
  TrainConfig cfg;
  cfg.optimizer = Optimizer::kSgd;
  cfg.learning_rate = 1e-9;
  cfg.epochs = 1;
  BaselineOptions opt;
  opt.max_iters = 3;
  opt.n_spec = 5;
  opt.n_train = 2;
  const auto r = naive_baseline(net, props, train, cfg, opt, testing::solver_options());
  EXPECT_FALSE(r.repaired);
  EXPECT_EQ(r.iterations, 3u);
  EXPECT_EQ(r.verifications, 4u);
  ASSERT_EQ(r.rounds.size(), 4u);
  // The augmented set is cumulative: 1, then +7 per round.
  EXPECT_EQ(r.rounds[0].training_points, 1u);
  EXPECT_EQ(r.rounds[3].training_points, 22u);
}

}  // namespace
}  // namespace nnrepair
