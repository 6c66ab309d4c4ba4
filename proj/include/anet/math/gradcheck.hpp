#pragma once

#include <functional>
#include <span>
#include <string>

#include "anet/math/tape.hpp"

namespace anet::math {

struct GradCheckOptions {
  double fd_step = 1e-5;       // central difference step
  double tolerance = 1e-4;
  double kink_threshold = 1e-3;  // one-sided slope gap marking a kink
  std::size_t max_coords = 500;  // subsample bound for large models
  std::uint64_t seed = 0;        // subsample selection
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_block;
  std::size_t worst_coord = 0;
  std::size_t coords_checked = 0;
  std::size_t coords_kink_adjacent = 0;
  double tolerance = 0.0;
  bool passed = false;
};

// Compares analytic gradients against central finite differences.
//
// `loss_fn(with_grad)` must deterministically map the current parameter
// values to a scalar loss; when with_grad is true it must additionally
// leave the analytic gradient in each block's grad slot (zeroing first).
// Checks every coordinate, or a seeded subsample of max_coords when the
// model is larger. Relative error is |a - n| / max(1, |a| + |n|).
//
// Where the forward and backward one-sided slopes disagree, an activation
// kink lies inside the probe interval and the centered estimate averages
// the two branches instead of measuring either one. The analytic
// subgradient is then compared against the nearer one-sided slope; such
// coordinates are counted separately in the report.
// Throws ContractError if two evaluations of the closure disagree.
GradCheckReport check_gradients(const std::function<double(bool with_grad)>& loss_fn,
                                std::span<ParamBlock* const> params,
                                const GradCheckOptions& options = {});

}  // namespace anet::math
