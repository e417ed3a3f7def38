#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nnrepair/datagen.hpp"
#include "nnrepair/encoder.hpp"
#include "nnrepair/trainer.hpp"

namespace nnrepair {

struct BaselineOptions {
  std::size_t max_iters = 20;
  /// Points drawn uniformly from each violated ball per iteration.
  std::size_t n_spec = 200;
  /// Original training points resampled per iteration.
  std::size_t n_train = 200;
  std::uint64_t seed = 0;
};

struct BaselineRound {
  std::vector<PropertyStatus> statuses;
  std::size_t training_points = 0;
};

struct BaselineResult {
  Network network;
  bool repaired = false;
  /// Number of retraining rounds (at most max_iters).
  std::size_t iterations = 0;
  std::size_t verifications = 0;
  std::vector<BaselineRound> rounds;
  std::optional<std::string> error;
};

/// `n` points uniform in the ball (L1 or Linf).
std::vector<std::vector<double>> sample_in_ball(const RobustnessProperty& prop, std::size_t n,
                                                std::uint64_t seed);

/// Verify, augment the training set with ball samples labelled by the target
/// class plus resampled originals, retrain from the current network, repeat.
/// The augmented set grows across iterations.
BaselineResult naive_baseline(const Network& net0, std::span<const RobustnessProperty> props,
                              std::span<const LabeledPoint> train_data, const TrainConfig& train,
                              const BaselineOptions& options,
                              const smt::SolverOptions& solver);

}  // namespace nnrepair
