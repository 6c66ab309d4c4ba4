#pragma once

#include <numeric>
#include <random>

#include "anet/math/adam.hpp"
#include "anet/sample/samplegen.hpp"

namespace anet::train {

struct TrainConfig {
  std::size_t batch_size = 256;
  std::size_t steps = 7000;
  double learning_rate = 1e-4;
  double l1_coeff = 1e-5;
  std::uint64_t seed = 0;
  double max_history_years = 5.0;
  double min_horizon_years = 0.25;
  double max_horizon_years = 1.0;

  sample::SamplingConfig sampling() const {
    sample::SamplingConfig cfg;
    cfg.max_history_years = max_history_years;
    cfg.min_horizon_years = min_horizon_years;
    cfg.max_horizon_years = max_horizon_years;
    return cfg;
  }
  double delta_t_max() const { return max_history_years + max_horizon_years; }
  void check() const {
    require(batch_size >= 1 && steps >= 1, "TrainConfig: batch_size and steps must be >= 1");
    require(learning_rate > 0.0, "TrainConfig: learning_rate must be > 0");
    require(l1_coeff >= 0.0, "TrainConfig: l1_coeff must be >= 0");
  }
};

struct TrainResult {
  std::vector<double> loss_trace;  // one entry per step: batch MSE + L1
};

// Minibatch Adam on MSE plus L1, with shuffled-epoch batch order. Fully
// deterministic given the seed; a non-finite loss aborts with the step and
// batch index. Model must provide parameters() and
// forward(Tape&, const Sample&, std::mt19937_64*).
template <class Model, class Sample>
TrainResult train(Model& model, std::span<const Sample> samples, const TrainConfig& cfg) {
  cfg.check();
  require(!samples.empty(), "train: sample set is empty");

  auto params = model.parameters();
  math::AdamState adam(params, cfg.learning_rate);
  std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, 0x5u));
  std::mt19937_64 dropout_rng(derive_seed(cfg.seed, 0xDu));

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), shuffle_rng);
  std::size_t cursor = 0;

  const std::size_t batch = std::min(cfg.batch_size, samples.size());
  TrainResult result;
  result.loss_trace.reserve(cfg.steps);
  math::Tape tape;
  std::vector<math::NodeId> preds(batch);
  std::vector<double> targets(batch);

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    tape.reset();
    for (std::size_t b = 0; b < batch; ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        cursor = 0;
      }
      const Sample& s = samples[order[cursor++]];
      preds[b] = model.forward(tape, s, &dropout_rng);
      targets[b] = s.label;
    }
    const math::NodeId loss_node = math::mse_loss(tape, preds, targets);
    math::zero_grads(params);
    tape.backward(loss_node);
    const double penalty = math::l1_penalty(params, cfg.l1_coeff);
    const double loss = tape.value(loss_node)[0] + penalty;
    if (!std::isfinite(loss)) {
      throw TrainError("train: non-finite loss at step " + std::to_string(step) + ", batch " +
                       std::to_string(step));
    }
    math::adam_step(params, adam);
    result.loss_trace.push_back(loss);
  }
  return result;
}

}  // namespace anet::train
