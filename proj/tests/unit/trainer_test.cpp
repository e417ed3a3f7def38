#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "nnrepair/datagen.hpp"
#include "nnrepair/error.hpp"
#include "nnrepair/evaluator.hpp"
#include "nnrepair/trainer.hpp"
#include "test_support.hpp"

namespace nnrepair {
namespace {

TEST(Trainer, SoftmaxRoundedValues) {
  const std::array<double, 3> z{2, 3, 5};
  const auto p = softmax(z);
  EXPECT_NEAR(p[0], 0.042, 5e-4);
  EXPECT_NEAR(p[1], 0.114, 5e-4);
  EXPECT_NEAR(p[2], 0.844, 5e-4);
  EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-15);
}

TEST(Trainer, SoftmaxIsStableForLargeLogits) {
  const std::array<double, 2> z{1000, 0};
  const auto p = softmax(z);
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_TRUE(std::isfinite(p[1]));
}

TEST(Trainer, ZeroNetworkLossIsLog2) {
  const Network net = Network::zeros(std::vector<std::size_t>{2, 4, 2});
  const std::vector<LabeledPoint> batch{{{1, 2}, 0}, {{-3, 4}, 1}};
  EXPECT_NEAR(loss(net, batch), 0.693147, 1e-6);
}

double max_relative_error(const Network& net, const std::vector<LabeledPoint>& batch) {
  const auto grad = loss_gradient(net, batch);
  const auto ids = net.enumerate_weight_ids();
  const double h = 1e-3;
  double worst = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const double v = to_double(net.parameter(ids[i]));
    const double up = loss(net.substitute({{ids[i], exact_from_double(v + h)}}), batch);
    const double dn = loss(net.substitute({{ids[i], exact_from_double(v - h)}}), batch);
    const double fd = (up - dn) / (2 * h);
    const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-8});
    worst = std::max(worst, std::abs(fd - grad[i]) / denom);
  }
  return worst;
}

TEST(Trainer, GradientMatchesFiniteDifferences) {
  const Network net = init_network(std::vector<std::size_t>{2, 1, 2}, 7);
  // Keep the hidden unit active on every point so the kink is not crossed.
  const Network active = net.substitute({{WeightId::weight(1, 0, 0), Rational(1, 2)},
                                         {WeightId::weight(1, 0, 1), Rational(1, 3)},
                                         {WeightId::bias(1, 0), Rational(1)}});
  const std::vector<LabeledPoint> batch{{{0.5, 1.0}, 0}, {{2.0, -0.5}, 1}, {{1.0, 1.0}, 1}};
  EXPECT_LE(max_relative_error(active, batch), 1e-4);
  const Network wide = init_network(std::vector<std::size_t>{2, 4, 2}, 3);
  EXPECT_LE(max_relative_error(wide, {{{0.3, 0.7}, 1}, {{-0.4, 0.1}, 0}}), 1e-4);
}

TEST(Trainer, SgdLearnsXor) {
  const Dataset d = generate_mixture(xor_a_spec(), 800, 200, 1);
  TrainConfig cfg;
  cfg.optimizer = Optimizer::kSgd;
  cfg.learning_rate = 0.1;
  cfg.epochs = 10;
  cfg.batch_size = 16;
  cfg.seed = 1;
  Network best = init_network(std::vector<std::size_t>{2, 4, 2}, 1);
  double acc = 0.0;
  // A small net can land in a bad basin; try a few initialisations.
  for (std::uint64_t s = 1; s <= 5 && acc < 0.99; ++s) {
    const Network trained = train(init_network(std::vector<std::size_t>{2, 4, 2}, s), d.train, cfg);
    acc = std::max(acc, accuracy(trained, d.train));
  }
  EXPECT_GE(acc, 0.99);
}

TEST(Trainer, MemorisesSinglePoint) {
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 1;
  const std::vector<LabeledPoint> one{{{1.0, -2.0}, 1}};
  const Network net = train(init_network(std::vector<std::size_t>{2, 3, 2}, 2), one, cfg);
  EXPECT_EQ(net.decide(one[0].x), 1u);
  EXPECT_LT(loss(net, one), 0.05);
}

TEST(Trainer, DeterministicForSeed) {
  const Dataset d = generate_mixture(xor_a_spec(), 100, 10, 1);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 5;
  const Network n0 = init_network(std::vector<std::size_t>{2, 4, 2}, 5);
  EXPECT_EQ(train(n0, d.train, cfg), train(n0, d.train, cfg));
}

TEST(Trainer, DivergenceIsReported) {
  const std::vector<LabeledPoint> huge{{{1e300, -1e300}, 0}, {{-1e300, 1e300}, 1}};
  TrainConfig cfg;
  cfg.optimizer = Optimizer::kSgd;
  cfg.learning_rate = 0.5;
  cfg.epochs = 5;
  EXPECT_THROW(train(init_network(std::vector<std::size_t>{2, 4, 2}, 1), huge, cfg),
               TrainingError);
}

TEST(Trainer, ConfigValidation) {
  TrainConfig cfg;
  cfg.learning_rate = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_EQ(parse_optimizer("sgd"), Optimizer::kSgd);
  EXPECT_THROW(parse_optimizer("rmsprop"), ConfigError);
}

}  // namespace
}  // namespace nnrepair
