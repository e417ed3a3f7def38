#include "nnrepair/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nnrepair/error.hpp"

namespace nnrepair {
namespace {

// Double-precision working copy of a Network used for backpropagation.
struct Mlp {
  struct Layer {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> w;
    std::vector<double> b;
  };
  std::vector<Layer> layers;

  explicit Mlp(const Network& net) {
    for (const auto& layer : net.layers()) {
      layers.push_back({layer.rows, layer.cols, to_doubles(layer.weights), to_doubles(layer.biases)});
    }
  }

  Mlp zeros_like() const {
    Mlp g = *this;
    for (auto& layer : g.layers) {
      std::fill(layer.w.begin(), layer.w.end(), 0.0);
      std::fill(layer.b.begin(), layer.b.end(), 0.0);
    }
    return g;
  }

  Network to_network() const {
    std::vector<LayerParams> out;
    for (const auto& layer : layers) {
      LayerParams p;
      p.rows = layer.rows;
      p.cols = layer.cols;
      p.weights = decimals_from_doubles(layer.w);
      p.biases = decimals_from_doubles(layer.b);
      out.push_back(std::move(p));
    }
    return Network(std::move(out));
  }

  // Flattened in enumerate_weight_ids order: per layer weights row-major, then biases.
  std::vector<double> flatten() const {
    std::vector<double> flat;
    for (const auto& layer : layers) {
      flat.insert(flat.end(), layer.w.begin(), layer.w.end());
      flat.insert(flat.end(), layer.b.begin(), layer.b.end());
    }
    return flat;
  }

  std::size_t output_dim() const { return layers.back().rows; }

  // Adds d(-log softmax(out)[label])/dparams into grad; returns that loss term.
  double accumulate(const LabeledPoint& p, Mlp& grad, std::vector<std::vector<double>>& acts) const {
    acts.resize(layers.size() + 1);
    acts[0] = p.x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& layer = layers[l];
      const bool hidden = l + 1 < layers.size();
      auto& out = acts[l + 1];
      out.assign(layer.rows, 0.0);
      for (std::size_t r = 0; r < layer.rows; ++r) {
        double sum = layer.b[r];
        for (std::size_t c = 0; c < layer.cols; ++c) {
          sum += layer.w[r * layer.cols + c] * acts[l][c];
        }
        out[r] = hidden ? std::max(0.0, sum) : sum;
      }
    }
    const auto& logits = acts.back();
    auto probs = softmax(logits);
    // -log softmax(logits)[label] via logsumexp.
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum_exp = 0.0;
    for (double v : logits) {
      sum_exp += std::exp(v - mx);
    }
    const double stable = mx + std::log(sum_exp) - logits[p.label];

    std::vector<double> delta(probs);
    delta[p.label] -= 1.0;
    for (std::size_t l = layers.size(); l-- > 0;) {
      const auto& layer = layers[l];
      auto& g = grad.layers[l];
      const auto& input = acts[l];
      for (std::size_t r = 0; r < layer.rows; ++r) {
        g.b[r] += delta[r];
        for (std::size_t c = 0; c < layer.cols; ++c) {
          g.w[r * layer.cols + c] += delta[r] * input[c];
        }
      }
      if (l == 0) {
        break;
      }
      std::vector<double> prev(layer.cols, 0.0);
      for (std::size_t c = 0; c < layer.cols; ++c) {
        if (input[c] <= 0.0) {
          continue;  // ReLU inactive
        }
        double s = 0.0;
        for (std::size_t r = 0; r < layer.rows; ++r) {
          s += layer.w[r * layer.cols + c] * delta[r];
        }
        prev[c] = s;
      }
      delta.swap(prev);
    }
    return stable;
  }
};

void check_batch(const Network& net, std::span<const LabeledPoint> batch) {
  for (const auto& p : batch) {
    if (p.x.size() != net.input_dim()) {
      throw InvalidInputError("training point dimension differs from network input");
    }
    if (p.label >= net.output_dim()) {
      throw InvalidInputError("label " + std::to_string(p.label) + " outside network outputs");
    }
  }
}

}  // namespace

Optimizer parse_optimizer(std::string_view name) {
  if (name == "sgd") {
    return Optimizer::kSgd;
  }
  if (name == "adam") {
    return Optimizer::kAdam;
  }
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0 && learning_rate < 1.0)) {
    throw ConfigError("learning rate must lie in (0, 1)");
  }
  if (epochs == 0) {
    throw ConfigError("epochs must be at least 1");
  }
  if (batch_size == 0) {
    throw ConfigError("batch size must be at least 1");
  }
}

Network init_network(std::span<const std::size_t> topology, std::uint64_t seed) {
  if (topology.size() < 2) {
    throw InvalidInputError("topology needs at least input and output widths");
  }
  std::mt19937_64 rng(seed);
  std::vector<LayerParams> layers;
  for (std::size_t i = 1; i < topology.size(); ++i) {
    const std::size_t rows = topology[i];
    const std::size_t cols = topology[i - 1];
    if (rows == 0 || cols == 0) {
      throw InvalidInputError("topology widths must be positive");
    }
    const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    std::vector<double> w(rows * cols);
    std::vector<double> b(rows);
    for (double& v : w) {
      v = dist(rng);
    }
    for (double& v : b) {
      v = dist(rng);
    }
    layers.push_back({rows, cols, decimals_from_doubles(w), decimals_from_doubles(b)});
  }
  return Network(std::move(layers));
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) {
    return {};
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) {
    v /= sum;
  }
  return out;
}

double loss(const Network& net, std::span<const LabeledPoint> batch) {
  check_batch(net, batch);
  if (batch.empty()) {
    return 0.0;
  }
  double total = 0.0;
  for (const auto& p : batch) {
    auto logits = net.forward(p.x);
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum_exp = 0.0;
    for (double v : logits) {
      sum_exp += std::exp(v - mx);
    }
    total += mx + std::log(sum_exp) - logits[p.label];
  }
  return total / static_cast<double>(batch.size());
}

std::vector<double> loss_gradient(const Network& net, std::span<const LabeledPoint> batch) {
  check_batch(net, batch);
  Mlp model(net);
  Mlp grad = model.zeros_like();
  std::vector<std::vector<double>> acts;
  for (const auto& p : batch) {
    model.accumulate(p, grad, acts);
  }
  auto flat = grad.flatten();
  if (!batch.empty()) {
    for (double& v : flat) {
      v /= static_cast<double>(batch.size());
    }
  }
  return flat;
}

Network train(const Network& net0, std::span<const LabeledPoint> data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty()) {
    throw InvalidInputError("training data is empty");
  }
  check_batch(net0, data);

  Mlp model(net0);
  Mlp grad = model.zeros_like();
  Mlp m1 = model.zeros_like();
  Mlp m2 = model.zeros_like();
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::vector<double>> acts;
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      grad = model.zeros_like();
      for (std::size_t i = start; i < end; ++i) {
        epoch_loss += model.accumulate(data[order[i]], grad, acts);
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      ++step;
      for (std::size_t l = 0; l < model.layers.size(); ++l) {
        auto update = [&](std::vector<double>& params, std::vector<double>& g,
                          std::vector<double>& first, std::vector<double>& second) {
          for (std::size_t k = 0; k < params.size(); ++k) {
            const double gk = g[k] * scale;
            if (cfg.optimizer == Optimizer::kSgd) {
              params[k] -= cfg.learning_rate * gk;
              continue;
            }
            first[k] = cfg.beta1 * first[k] + (1 - cfg.beta1) * gk;
            second[k] = cfg.beta2 * second[k] + (1 - cfg.beta2) * gk * gk;
            const double m_hat = first[k] / (1 - std::pow(cfg.beta1, static_cast<double>(step)));
            const double v_hat = second[k] / (1 - std::pow(cfg.beta2, static_cast<double>(step)));
            params[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
          }
        };
        update(model.layers[l].w, grad.layers[l].w, m1.layers[l].w, m2.layers[l].w);
        update(model.layers[l].b, grad.layers[l].b, m1.layers[l].b, m2.layers[l].b);
      }
    }
    if (!std::isfinite(epoch_loss)) {
      throw TrainingError("loss is not finite", epoch);
    }
    for (const auto& layer : model.layers) {
      for (double v : layer.w) {
        if (!std::isfinite(v)) {
          throw TrainingError("parameters diverged", epoch);
        }
      }
    }
  }
  return model.to_network();
}

}  // namespace nnrepair
