#include "nnrepair/baseline.hpp"

#include <random>

#include "nnrepair/error.hpp"

namespace nnrepair {

std::vector<std::vector<double>> sample_in_ball(const RobustnessProperty& prop, std::size_t n,
                                                std::uint64_t seed) {
  const std::size_t d = prop.center.size();
  const std::vector<double> c = to_doubles(prop.center);
  const double delta = to_double(prop.delta);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<double>> out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> x(d);
    if (prop.norm == Norm::kLinf) {
      for (std::size_t i = 0; i < d; ++i) {
        x[i] = c[i] + delta * unit(rng);
      }
    } else {
      // d+1 exponential spacings give a uniform point of the simplex; random
      // signs spread it over the cross-polytope.
      std::vector<double> e(d + 1);
      double total = 0.0;
      for (auto& v : e) {
        v = expo(rng);
        total += v;
      }
      for (std::size_t i = 0; i < d; ++i) {
        const double r = delta * e[i] / total;
        x[i] = c[i] + (coin(rng) ? r : -r);
      }
    }
    out.push_back(std::move(x));
  }
  return out;
}

BaselineResult naive_baseline(const Network& net0, std::span<const RobustnessProperty> props,
                              std::span<const LabeledPoint> train_data, const TrainConfig& train,
                              const BaselineOptions& options,
                              const smt::SolverOptions& solver) {
  if (train_data.empty()) {
    throw InvalidInputError("naive baseline needs training data");
  }
  BaselineResult result{net0, false, 0, 0, {}, std::nullopt};
  std::vector<LabeledPoint> augmented(train_data.begin(), train_data.end());
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, train_data.size() - 1);

  for (;;) {
    BaselineRound round;
    bool safe = true;
    for (const auto& prop : props) {
      const auto v = verify_property(result.network, prop, solver);
      round.statuses.push_back(v.status);
      safe = safe && v.status == PropertyStatus::kHolds;
    }
    ++result.verifications;
    round.training_points = augmented.size();
    result.rounds.push_back(round);
    if (safe) {
      result.repaired = true;
      return result;
    }
    if (result.iterations >= options.max_iters) {
      return result;
    }
    for (std::size_t p = 0; p < props.size(); ++p) {
      if (round.statuses[p] == PropertyStatus::kHolds) {
        continue;
      }
      for (auto& x : sample_in_ball(props[p], options.n_spec, rng())) {
        augmented.push_back({std::move(x), props[p].target_class});
      }
    }
    for (std::size_t i = 0; i < options.n_train; ++i) {
      augmented.push_back(train_data[pick(rng)]);
    }
    TrainConfig cfg = train;
    cfg.seed = rng();
    try {
      result.network = nnrepair::train(result.network, augmented, cfg);
    } catch (const TrainingError& e) {
      result.error = e.what();
      return result;
    }
    ++result.iterations;
  }
}

}  // namespace nnrepair
