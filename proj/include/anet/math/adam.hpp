#pragma once

#include <cstdint>
#include <span>

#include "anet/math/tape.hpp"

namespace anet::math {

// Bias-corrected Adam. Moment accumulators are laid out per parameter
// block, in the same order the blocks were registered with.
struct AdamState {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<Vec> first_moment;
  std::vector<Vec> second_moment;

  AdamState() = default;
  AdamState(std::span<ParamBlock* const> params, double lr);
};

// Applies one Adam update from the gradients currently stored in the
// blocks, then increments the step counter. Throws TrainError naming the
// offending block on a non-finite gradient, and ContractError on any
// accumulator/parameter shape mismatch.
void adam_step(std::span<ParamBlock* const> params, AdamState& state);

// Adds coefficient * sum(|w|) over blocks with regularize == true (bias
// vectors are excluded) and accumulates the subgradient
// coefficient * sign(w) (0 at w == 0) into the block gradients.
// Returns the penalty value.
double l1_penalty(std::span<ParamBlock* const> params, double coefficient);

}  // namespace anet::math
