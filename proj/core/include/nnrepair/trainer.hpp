#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nnrepair/datagen.hpp"
#include "nnrepair/network.hpp"

namespace nnrepair {

enum class Optimizer { kSgd, kAdam };

Optimizer parse_optimizer(std::string_view name);

struct TrainConfig {
  Optimizer optimizer = Optimizer::kAdam;
  double learning_rate = 0.01;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases likewise.
Network init_network(std::span<const std::size_t> topology, std::uint64_t seed);

std::vector<double> softmax(std::span<const double> logits);

/// Mean of -log softmax(forward(x))[label]. The softmax lives only here; the
/// network output layer stays linear.
double loss(const Network& net, std::span<const LabeledPoint> batch);

/// d loss / d parameter, ordered like net.enumerate_weight_ids().
std::vector<double> loss_gradient(const Network& net, std::span<const LabeledPoint> batch);

/// Mini-batch training from `net0`. Deterministic for a fixed seed and data
/// order. Throws TrainingError when the loss stops being finite.
Network train(const Network& net0, std::span<const LabeledPoint> data, const TrainConfig& cfg);

}  // namespace nnrepair
